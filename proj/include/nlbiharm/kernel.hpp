#pragma once

// Scaled Gaussian interaction kernel and its closed-form polynomial moments.
//
// The kernel family is
//   R_delta(x,y) = K_delta(x,y) = c_delta * exp(-|x-y|^2 / delta^2),
//   c_delta     = 4 * pi^(-d/2) * delta^(-d),
// together with the antiderivative kernel Rbar_delta = R_delta / 4 that
// carries boundary flux data. All inner integrals against piecewise
// polynomials reduce to the moments
//   f_k(eta,a,b) = \int_a^b r^k exp(-eta^2 r^2) dr,  k = 0..3,
// which are evaluated from erf/exp without any numerical quadrature.

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace nlbiharm {

/// A point in [0,1]^d; coordinates past the active dimension are ignored.
using Point = std::array<double, 2>;

struct KernelParams {
  double delta;        ///< nonlocal horizon, > 0
  int dim;             ///< spatial dimension, 1 or 2
  double c_delta;      ///< normalization 4 * pi^(-d/2) * delta^(-d)
  double eta;          ///< moment scaling factor, 1/delta
  double rbar_ratio;   ///< Rbar_delta / R_delta = 1/4
  double kernel_mass;  ///< \int_{R^d} R_delta dy = 4
  double rbar_mass;    ///< \int_{R^d} Rbar_delta dy = 1

  KernelParams(double delta_, int dim_) : delta(delta_), dim(dim_) {
    if (!(delta > 0.0)) {
      throw std::invalid_argument("KernelParams: delta must be positive");
    }
    if (dim != 1 && dim != 2) {
      throw std::invalid_argument("KernelParams: dim must be 1 or 2");
    }
    c_delta = 4.0 * std::pow(M_PI, -0.5 * dim) * std::pow(delta, -dim);
    eta = 1.0 / delta;
    rbar_ratio = 0.25;
    kernel_mass = 4.0;
    rbar_mass = 1.0;
  }
};

namespace detail {

/// exp(-x1) - exp(-x2) without cancellation for nearby exponents.
inline double exp_diff(double x1, double x2) {
  return (x1 <= x2) ? -std::exp(-x1) * std::expm1(x1 - x2)
                    : std::exp(-x2) * std::expm1(x2 - x1);
}

/// erf(x2) - erf(x1), routed through erfc when both arguments share a sign
/// so that the tails do not round to zero prematurely.
inline double erf_diff(double x1, double x2) {
  if (x1 >= 0.0 && x2 >= 0.0) return std::erfc(x1) - std::erfc(x2);
  if (x1 <= 0.0 && x2 <= 0.0) return std::erfc(-x2) - std::erfc(-x1);
  return std::erf(x2) - std::erf(x1);
}

inline void check_point(const KernelParams& params, std::span<const double> x,
                        const char* who) {
  if (static_cast<int>(x.size()) != params.dim) {
    throw std::invalid_argument(std::string(who) + ": point dimension " +
                                std::to_string(x.size()) +
                                " does not match kernel dim " +
                                std::to_string(params.dim));
  }
}

}  // namespace detail

/// \int_a^b r^k exp(-eta^2 r^2) dr for k in {0,1,2,3}. The integral is
/// oriented: swapping a and b flips the sign. Far tails underflow to zero
/// silently.
inline double gaussian_moment(int k, double eta, double a, double b) {
  if (k < 0 || k > 3) {
    throw std::invalid_argument("gaussian_moment: k must be in {0,1,2,3}");
  }
  if (!(eta > 0.0)) {
    throw std::invalid_argument("gaussian_moment: eta must be positive");
  }
  const double eta2 = eta * eta;
  const double xa = eta2 * a * a;
  const double xb = eta2 * b * b;
  switch (k) {
    case 0:
      return 0.5 * std::sqrt(M_PI) / eta * detail::erf_diff(eta * a, eta * b);
    case 1:
      return 0.5 / eta2 * detail::exp_diff(xa, xb);
    case 2:
      return 0.5 / eta2 *
             (a * detail::exp_diff(xa, xb) + (a - b) * std::exp(-xb) +
              gaussian_moment(0, eta, a, b));
    default:  // k == 3
      return 0.5 / eta2 *
                 (a * a * detail::exp_diff(xa, xb) +
                  (a - b) * (a + b) * std::exp(-xb)) +
             gaussian_moment(1, eta, a, b) / eta2;
  }
}

/// R_delta(x,y) = c_delta * exp(-|x-y|^2 / delta^2).
inline double kernel_eval(const KernelParams& params, std::span<const double> x,
                          std::span<const double> y) {
  detail::check_point(params, x, "kernel_eval");
  detail::check_point(params, y, "kernel_eval");
  double r2 = 0.0;
  for (int i = 0; i < params.dim; ++i) {
    const double d = x[i] - y[i];
    r2 += d * d;
  }
  return params.c_delta * std::exp(-r2 * params.eta * params.eta);
}

/// Antiderivative kernel Rbar_delta(x,y) = R_delta(x,y) / 4.
inline double rbar_eval(const KernelParams& params, std::span<const double> x,
                        std::span<const double> y) {
  return params.rbar_ratio * kernel_eval(params, x, y);
}

/// \int_{[0,1]^d} R_delta(x,y) dy, evaluated coordinate-wise from f_0.
inline double domain_mass(const KernelParams& params,
                          std::span<const double> x) {
  detail::check_point(params, x, "domain_mass");
  double m = params.c_delta;
  for (int i = 0; i < params.dim; ++i) {
    m *= gaussian_moment(0, params.eta, x[i] - 1.0, x[i]);
  }
  return m;
}

}  // namespace nlbiharm
