#pragma once

// Outer quadrature rules: composite Simpson 3/8 for the load term and
// Gauss-Legendre rules for everything touching the kernel. Cells whose
// width exceeds the 3*delta boundary layers are split into two edge panels
// plus an interior panel, since the integrands vary on the scale delta near
// cell interfaces.

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "nlbiharm/mesh.hpp"

namespace nlbiharm {

struct QuadRule {
  std::vector<double> points;
  std::vector<double> weights;
  double a = 0.0;
  double b = 0.0;

  std::size_t size() const { return points.size(); }
};

/// Tensor product of two 1D rules; combined weight w_ij = w_i * w_j with
/// the first rule's index running slowest.
struct TensorQuadRule {
  QuadRule rx;
  QuadRule ry;

  std::size_t size() const { return rx.size() * ry.size(); }
  Point point(std::size_t k) const {
    return {rx.points[k / ry.size()], ry.points[k % ry.size()]};
  }
  double weight(std::size_t k) const {
    return rx.weights[k / ry.size()] * ry.weights[k % ry.size()];
  }
};

namespace detail {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1,1], found by
/// Newton iteration on P_n to ~1e-15 and symmetrized. Ascending order.
inline std::pair<std::vector<double>, std::vector<double>> make_gl_reference(
    int n) {
  std::vector<double> x(n), w(n);
  for (int i = 1; i <= n; ++i) {
    double t = std::cos(M_PI * (i - 0.25) / (n + 0.5));
    double p_prev = 0.0, p = 0.0;
    for (int it = 0; it < 100; ++it) {
      p_prev = 1.0;
      p = t;
      for (int k = 1; k < n; ++k) {
        const double p_next = ((2 * k + 1) * t * p - k * p_prev) / (k + 1);
        p_prev = p;
        p = p_next;
      }
      const double dp = n * (t * p - p_prev) / (t * t - 1.0);
      const double dt = p / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    p_prev = 1.0;
    p = t;
    for (int k = 1; k < n; ++k) {
      const double p_next = ((2 * k + 1) * t * p - k * p_prev) / (k + 1);
      p_prev = p;
      p = p_next;
    }
    const double dp = n * (t * p - p_prev) / (t * t - 1.0);
    x[i - 1] = t;
    w[i - 1] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  // Newton ordering is descending; flip and enforce exact symmetry.
  std::vector<double> xs(n), ws(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = x[n - 1 - i];
    ws[i] = w[n - 1 - i];
  }
  for (int i = 0; i < n / 2; ++i) {
    const double xm = 0.5 * (xs[n - 1 - i] - xs[i]);
    const double wm = 0.5 * (ws[i] + ws[n - 1 - i]);
    xs[i] = -xm;
    xs[n - 1 - i] = xm;
    ws[i] = ws[n - 1 - i] = wm;
  }
  if (n % 2 == 1) xs[n / 2] = 0.0;
  return {xs, ws};
}

inline const std::pair<std::vector<double>, std::vector<double>>&
gl_reference(int n) {
  static const auto gl2 = make_gl_reference(2);
  static const auto gl5 = make_gl_reference(5);
  static const auto gl15 = make_gl_reference(15);
  switch (n) {
    case 2:
      return gl2;
    case 5:
      return gl5;
    case 15:
      return gl15;
    default:
      throw std::invalid_argument("gauss_legendre: unsupported point count " +
                                  std::to_string(n));
  }
}

}  // namespace detail

/// n-point Gauss-Legendre rule mapped affinely onto [a,b]; n in {2,5,15}.
inline QuadRule gauss_legendre(int n, double a, double b) {
  const auto& [xs, ws] = detail::gl_reference(n);
  if (!(b >= a)) {
    throw std::invalid_argument("gauss_legendre: interval must satisfy b >= a");
  }
  QuadRule rule;
  rule.a = a;
  rule.b = b;
  rule.points.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    rule.points[i] = half * xs[i] + mid;
    rule.weights[i] = half * ws[i];
  }
  return rule;
}

/// Simpson 3/8 rule on one cell; its 4 nodes coincide with the cubic basis
/// nodes of the cell, and the rule is exact on cubics.
inline QuadRule simpson38_cell(double a, double b) {
  if (!(b > a)) {
    throw std::invalid_argument("simpson38_cell: degenerate cell");
  }
  const double h = b - a;
  QuadRule rule;
  rule.a = a;
  rule.b = b;
  rule.points = {a, a + h / 3.0, a + 2.0 * h / 3.0, b};
  rule.weights = {h / 8.0, 3.0 * h / 8.0, 3.0 * h / 8.0, h / 8.0};
  return rule;
}

/// 15-point outer rule for one cell: three 5-point panels separating the
/// 3*delta boundary layers when they fit, otherwise a single 15-point rule.
inline QuadRule layered_cell_rule(double a, double b, double delta) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("layered_cell_rule: delta must be positive");
  }
  if (!(b > a)) {
    throw std::invalid_argument("layered_cell_rule: degenerate cell");
  }
  const double h = b - a;
  if (6.0 * delta < h) {
    QuadRule rule;
    rule.a = a;
    rule.b = b;
    rule.points.reserve(15);
    rule.weights.reserve(15);
    const std::array<std::pair<double, double>, 3> panels = {
        {{a, a + 3.0 * delta}, {a + 3.0 * delta, b - 3.0 * delta},
         {b - 3.0 * delta, b}}};
    for (const auto& [pa, pb] : panels) {
      const QuadRule panel = gauss_legendre(5, pa, pb);
      rule.points.insert(rule.points.end(), panel.points.begin(),
                         panel.points.end());
      rule.weights.insert(rule.weights.end(), panel.weights.begin(),
                          panel.weights.end());
    }
    return rule;
  }
  return gauss_legendre(15, a, b);
}

inline TensorQuadRule tensorize(QuadRule rx, QuadRule ry) {
  return {std::move(rx), std::move(ry)};
}

/// Combined Simpson 3/8 weight of every 1D basis node; shared cell-boundary
/// nodes accumulate from both adjacent cells.
inline Eigen::VectorXd simpson_node_weights(const TensorMesh& mesh) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(mesh.n_nodes_1d());
  for (int i = 0; i < mesh.n_cells(); ++i) {
    const QuadRule rule = simpson38_cell(mesh.cell_left(i), mesh.cell_right(i));
    for (int q = 0; q < 4; ++q) w[3 * i + q] += rule.weights[q];
  }
  return w;
}

}  // namespace nlbiharm
