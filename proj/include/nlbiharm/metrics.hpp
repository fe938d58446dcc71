#pragma once

// Error metrics of a solved field against the manufactured ground truth:
// interior RMSE over all basis nodes, boundary value RMSE, and boundary
// normal-derivative RMSE (one-sided derivatives from the interior side,
// corners excluded in 2D).

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "nlbiharm/errors.hpp"
#include "nlbiharm/mesh.hpp"
#include "nlbiharm/problems.hpp"
#include "nlbiharm/solve.hpp"

namespace nlbiharm {

/// Root mean squared error over all (3N+1)^d basis nodes; the basis is
/// nodal, so the discrete value at a node is its coefficient.
inline double compute_rmse(const SolutionField& solution,
                           const ManufacturedProblem& problem,
                           const TensorMesh& mesh) {
  const int n1 = mesh.n_nodes_1d();
  double acc = 0.0;
  if (mesh.dim() == 1) {
    for (int j = 0; j < n1; ++j) {
      const double e =
          problem.u_gt({mesh.node(j), 0.0}) - solution.coefficients[j];
      acc += e * e;
    }
    return std::sqrt(acc / n1);
  }
  for (int j1 = 0; j1 < n1; ++j1) {
    for (int j2 = 0; j2 < n1; ++j2) {
      const double e = problem.u_gt({mesh.node(j1), mesh.node(j2)}) -
                       solution.coefficients[mesh.linearize({j1, j2})];
      acc += e * e;
    }
  }
  return std::sqrt(acc / (static_cast<double>(n1) * n1));
}

namespace detail {

/// One-sided derivative of the discrete 1D trace along the line obtained by
/// freezing one index; `at_zero` selects the endpoint and the interior side.
inline double edge_normal_deriv_1d(const TensorMesh& mesh,
                                   const Eigen::VectorXd& coeff_line,
                                   bool at_zero) {
  const double s = at_zero ? 0.0 : 1.0;
  const int cell = at_zero ? 0 : mesh.n_cells() - 1;
  double du = 0.0;
  for (int j = 3 * cell; j <= 3 * cell + 3; ++j) {
    du += coeff_line[j] * lagrange_deriv_on_cell(mesh, j, cell, s);
  }
  return at_zero ? -du : du;  // outward normal direction
}

}  // namespace detail

/// Boundary value RMSE and boundary normal-derivative RMSE. 1D averages the
/// two endpoints; 2D averages the 12N boundary nodes for values and the
/// 12N-4 non-corner nodes for normal derivatives.
inline std::pair<double, double> compute_bd_errors(
    const SolutionField& solution, const ManufacturedProblem& problem,
    const TensorMesh& mesh) {
  const int n1 = mesh.n_nodes_1d();
  const Eigen::VectorXd& u = solution.coefficients;
  if (mesh.dim() == 1) {
    const double e0 = problem.u_gt({0.0, 0.0}) - u[0];
    const double e1 = problem.u_gt({1.0, 0.0}) - u[n1 - 1];
    const double bd = std::sqrt(0.5 * (e0 * e0 + e1 * e1));

    const double d0 =
        problem.b_end(0) - detail::edge_normal_deriv_1d(mesh, u, true);
    const double d1 =
        problem.b_end(1) - detail::edge_normal_deriv_1d(mesh, u, false);
    const double bd_dn = std::sqrt(0.5 * (d0 * d0 + d1 * d1));
    return {bd, bd_dn};
  }

  const int last = n1 - 1;
  double acc_val = 0.0;
  int n_val = 0;
  for (int j1 = 0; j1 < n1; ++j1) {
    for (int j2 = 0; j2 < n1; ++j2) {
      if (j1 != 0 && j1 != last && j2 != 0 && j2 != last) continue;
      const double e = problem.u_gt({mesh.node(j1), mesh.node(j2)}) -
                       u[mesh.linearize({j1, j2})];
      acc_val += e * e;
      ++n_val;
    }
  }

  double acc_dn = 0.0;
  int n_dn = 0;
  Eigen::VectorXd line(n1);
  auto add_edge = [&](int edge) {
    for (int t = 1; t < last; ++t) {
      // coefficient slice perpendicular to the edge at tangential node t
      for (int k = 0; k < n1; ++k) {
        line[k] = (edge <= 1) ? u[mesh.linearize({k, t})]
                              : u[mesh.linearize({t, k})];
      }
      const bool at_zero = (edge == 0 || edge == 2);
      const double dn = detail::edge_normal_deriv_1d(mesh, line, at_zero);
      const double e = problem.b_edge(edge, mesh.node(t)) - dn;
      acc_dn += e * e;
      ++n_dn;
    }
  };
  for (int edge = 0; edge < 4; ++edge) add_edge(edge);

  return {std::sqrt(acc_val / n_val), std::sqrt(acc_dn / n_dn)};
}

/// Least-squares slope of log(error) against log(delta).
inline double fit_slope(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 2) {
    throw InvalidDataError("fit_slope: need at least two points");
  }
  double mx = 0.0, my = 0.0;
  for (const auto& [d, e] : pairs) {
    if (!(d > 0.0) || !(e > 0.0)) {
      throw InvalidDataError("fit_slope: values must be positive");
    }
    mx += std::log(d);
    my += std::log(e);
  }
  mx /= pairs.size();
  my /= pairs.size();
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [d, e] : pairs) {
    const double dx = std::log(d) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(e) - my);
  }
  if (sxx == 0.0) {
    throw InvalidDataError("fit_slope: delta values are all equal");
  }
  return sxy / sxx;
}

}  // namespace nlbiharm
