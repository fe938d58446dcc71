#pragma once

// Manufactured problems: analytic ground truth u_gt, its gradient, the
// bilaplacian load f = Delta^2 u_gt, and clamped boundary data read off
// u_gt. The normal-derivative datum b uses the OUTWARD normal throughout:
// in 1D b(0) = -u'(0), b(1) = u'(1); in 2D the edge normals are
// x1=0 -> (-1,0), x1=1 -> (1,0), x2=0 -> (0,-1), x2=1 -> (0,1).

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "nlbiharm/errors.hpp"
#include "nlbiharm/kernel.hpp"

namespace nlbiharm {

/// Something that claims to be a manufactured problem but whose load is not
/// the bilaplacian of its ground truth.
struct InconsistentProblemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::array<std::array<double, 2>, 4> kEdgeNormals = {
    {{-1.0, 0.0}, {1.0, 0.0}, {0.0, -1.0}, {0.0, 1.0}}};

/// Point on edge e at tangential coordinate t; edges 0,1 fix x1 and are
/// parameterized by x2, edges 2,3 fix x2.
inline Point edge_point(int edge, double t) {
  switch (edge) {
    case 0:
      return {0.0, t};
    case 1:
      return {1.0, t};
    case 2:
      return {t, 0.0};
    default:
      return {t, 1.0};
  }
}

struct ManufacturedProblem {
  std::string name;
  int dim = 1;
  std::function<double(const Point&)> u_gt;
  std::function<std::array<double, 2>(const Point&)> grad_u_gt;
  std::function<double(const Point&)> f;

  /// Dirichlet datum a = u_gt restricted to the boundary.
  double a(const Point& x) const { return u_gt(x); }

  /// 1D outward normal derivative at an endpoint (end 0 or 1).
  double b_end(int end) const {
    const double du = grad_u_gt({end == 0 ? 0.0 : 1.0, 0.0})[0];
    return end == 0 ? -du : du;
  }

  /// 2D outward normal derivative on edge `edge` at tangential coordinate t.
  /// Well defined at corners as the limit along the edge.
  double b_edge(int edge, double t) const {
    const Point x = edge_point(edge, t);
    const auto g = grad_u_gt(x);
    const auto& n = kEdgeNormals[edge];
    return g[0] * n[0] + g[1] * n[1];
  }
};

namespace detail {

inline double fd_bilaplacian(const std::function<double(const Point&)>& u,
                             const Point& x, int dim, double s) {
  const double s4 = s * s * s * s;
  auto d4 = [&](int axis) {
    Point p = x;
    double acc = 6.0 * u(x);
    for (int k : {-2, -1, 1, 2}) {
      p = x;
      p[axis] = x[axis] + k * s;
      acc += ((k == -1 || k == 1) ? -4.0 : 1.0) * u(p);
    }
    return acc / s4;
  };
  double value = d4(0);
  if (dim == 1) return value;
  value += d4(1);
  // mixed term u_xxyy
  double cross = 4.0 * u(x);
  for (int kx : {-1, 1}) {
    for (int ky : {-1, 1}) {
      cross += u({x[0] + kx * s, x[1] + ky * s});
    }
  }
  for (int k : {-1, 1}) {
    cross -= 2.0 * u({x[0] + k * s, x[1]});
    cross -= 2.0 * u({x[0], x[1] + k * s});
  }
  return value + 2.0 * cross / s4;
}

}  // namespace detail

/// 1D problem with u_gt(x) = x^10.
inline ManufacturedProblem builtin_poly10() {
  ManufacturedProblem p;
  p.name = "poly10";
  p.dim = 1;
  p.u_gt = [](const Point& x) { return std::pow(x[0], 10); };
  p.grad_u_gt = [](const Point& x) {
    return std::array<double, 2>{10.0 * std::pow(x[0], 9), 0.0};
  };
  p.f = [](const Point& x) { return 5040.0 * std::pow(x[0], 6); };
  return p;
}

/// 2D problem with u_gt(x1,x2) = x1 * ln(1 + x2).
inline ManufacturedProblem builtin_xlog() {
  ManufacturedProblem p;
  p.name = "xlog";
  p.dim = 2;
  p.u_gt = [](const Point& x) { return x[0] * std::log1p(x[1]); };
  p.grad_u_gt = [](const Point& x) {
    return std::array<double, 2>{std::log1p(x[1]), x[0] / (1.0 + x[1])};
  };
  p.f = [](const Point& x) {
    const double w = 1.0 + x[1];
    return -6.0 * x[0] / (w * w * w * w);
  };
  return p;
}

/// Register a user-supplied problem. The load is cross-checked against a
/// finite-difference bilaplacian of u_gt on an interior sample grid; an
/// inconsistent (u_gt, f) pair is rejected.
inline ManufacturedProblem custom_problem(
    std::string name, int dim, std::function<double(const Point&)> u_gt,
    std::function<std::array<double, 2>(const Point&)> grad_u_gt,
    std::function<double(const Point&)> f) {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("custom_problem: dim must be 1 or 2");
  }
  ManufacturedProblem p;
  p.name = std::move(name);
  p.dim = dim;
  p.u_gt = std::move(u_gt);
  p.grad_u_gt = std::move(grad_u_gt);
  p.f = std::move(f);

  const double step = 1e-2;
  const std::array<double, 5> samples = {0.1, 0.3, 0.5, 0.7, 0.9};
  double max_f = 0.0;
  for (double sx : samples) {
    for (double sy : samples) {
      max_f = std::max(max_f, std::abs(p.f({sx, sy})));
      if (dim == 1) break;
    }
  }
  const double tol = 1e-2 * std::max(max_f, 1.0);
  for (double sx : samples) {
    for (double sy : samples) {
      const Point x = {sx, dim == 2 ? sy : 0.0};
      const double fd = detail::fd_bilaplacian(p.u_gt, x, dim, step);
      if (!(std::abs(fd - p.f(x)) <= tol)) {
        throw InconsistentProblemError(
            "custom_problem: load disagrees with the bilaplacian of u_gt "
            "near (" +
            std::to_string(x[0]) + "," + std::to_string(x[1]) + ")");
      }
      if (dim == 1) break;
    }
  }
  return p;
}

/// Built-in problem lookup used by the experiment driver.
inline std::optional<ManufacturedProblem> find_builtin(const std::string& name) {
  if (name == "poly10") return builtin_poly10();
  if (name == "xlog") return builtin_xlog();
  return std::nullopt;
}

}  // namespace nlbiharm
