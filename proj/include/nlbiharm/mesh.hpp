#pragma once

// Uniform tensor-product mesh on [0,1]^d and the piecewise multi-cubic
// nodal Lagrange basis.
//
// Each of the N cells per dimension carries 4 equally spaced nodes
// s_j = j/(3N), j = 0..3N, shared at cell boundaries, so the space is C^0
// (not C^1) with 3N+1 degrees of freedom per dimension. One-sided
// derivatives are exposed explicitly because psi_j' may jump at cell
// interfaces.

#include <cmath>
#include <functional>
#include <stdexcept>

#include <Eigen/Core>

#include "nlbiharm/errors.hpp"
#include "nlbiharm/kernel.hpp"

namespace nlbiharm {

enum class Side { left, right };

/// Per-dimension node indices of one degree of freedom; j2 is unused in 1D.
struct DofIndex {
  int j1 = 0;
  int j2 = 0;
};

class TensorMesh {
 public:
  TensorMesh(int n_cells, int dim) : n_cells_(n_cells), dim_(dim) {
    if (n_cells < 1) {
      throw std::invalid_argument("TensorMesh: n_cells must be positive");
    }
    if (dim != 1 && dim != 2) {
      throw std::invalid_argument("TensorMesh: dim must be 1 or 2");
    }
    h_ = 1.0 / n_cells;
  }

  int n_cells() const { return n_cells_; }
  int dim() const { return dim_; }
  double h() const { return h_; }
  int n_nodes_1d() const { return 3 * n_cells_ + 1; }
  Eigen::Index n_dofs() const {
    const Eigen::Index n1 = n_nodes_1d();
    return dim_ == 1 ? n1 : n1 * n1;
  }

  /// Node coordinate s_j = j/(3N); exact at both endpoints.
  double node(int j) const {
    return static_cast<double>(j) / static_cast<double>(3 * n_cells_);
  }
  double cell_left(int i) const { return node(3 * i); }
  double cell_right(int i) const { return node(3 * i + 3); }

  /// Row-major linearization, j1 * (3N+1) + j2 in 2D.
  Eigen::Index linearize(const DofIndex& dof) const {
    return dim_ == 1 ? dof.j1
                     : static_cast<Eigen::Index>(dof.j1) * n_nodes_1d() + dof.j2;
  }
  DofIndex delinearize(Eigen::Index idx) const {
    if (dim_ == 1) return {static_cast<int>(idx), 0};
    return {static_cast<int>(idx / n_nodes_1d()),
            static_cast<int>(idx % n_nodes_1d())};
  }

  /// Cell whose polynomial evaluates at s; interior shared nodes resolve to
  /// the left cell.
  int cell_for_eval(double s) const {
    int i = clamped_cell(s);
    if (i > 0 && s == cell_left(i)) --i;
    return i;
  }

  /// Cell providing the one-sided derivative at s.
  int cell_for_side(double s, Side side) const {
    int i = clamped_cell(s);
    if (side == Side::left && i > 0 && s == cell_left(i)) --i;
    return i;
  }

 private:
  int clamped_cell(double s) const {
    int i = static_cast<int>(s * n_cells_);
    if (i < 0) i = 0;
    if (i >= n_cells_) i = n_cells_ - 1;
    while (i > 0 && s < cell_left(i)) --i;
    while (i + 1 < n_cells_ && s >= cell_right(i)) ++i;
    return i;
  }

  int n_cells_;
  int dim_;
  double h_;
};

namespace detail {

inline void check_node_index(const TensorMesh& mesh, int j, const char* who) {
  if (j < 0 || j > 3 * mesh.n_cells()) {
    throw std::invalid_argument(std::string(who) + ": basis index " +
                                std::to_string(j) + " out of range");
  }
}

inline void check_coord(double s, const char* who) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw std::invalid_argument(std::string(who) +
                                ": coordinate outside [0,1]");
  }
}

/// Lagrange cubic of node j on cell i, evaluated at s. Zero if j is not a
/// node of cell i.
inline double lagrange_on_cell(const TensorMesh& mesh, int j, int i,
                               double s) {
  if (j < 3 * i || j > 3 * i + 3) return 0.0;
  double num = 1.0;
  double den = 1.0;
  const double sj = mesh.node(j);
  for (int m = 3 * i; m <= 3 * i + 3; ++m) {
    if (m == j) continue;
    num *= s - mesh.node(m);
    den *= sj - mesh.node(m);
  }
  return num / den;
}

inline double lagrange_deriv_on_cell(const TensorMesh& mesh, int j, int i,
                                     double s) {
  if (j < 3 * i || j > 3 * i + 3) return 0.0;
  const double sj = mesh.node(j);
  double den = 1.0;
  for (int m = 3 * i; m <= 3 * i + 3; ++m) {
    if (m != j) den *= sj - mesh.node(m);
  }
  double sum = 0.0;
  for (int p = 3 * i; p <= 3 * i + 3; ++p) {
    if (p == j) continue;
    double prod = 1.0;
    for (int m = 3 * i; m <= 3 * i + 3; ++m) {
      if (m == j || m == p) continue;
      prod *= s - mesh.node(m);
    }
    sum += prod;
  }
  return sum / den;
}

}  // namespace detail

/// psi_j(s): supported on one cell (j not a multiple of 3) or two adjacent
/// cells; equals 1 at s_j and 0 at every other node.
inline double basis_eval(const TensorMesh& mesh, int j, double s) {
  detail::check_node_index(mesh, j, "basis_eval");
  detail::check_coord(s, "basis_eval");
  return detail::lagrange_on_cell(mesh, j, mesh.cell_for_eval(s), s);
}

/// One-sided derivative of psi_j at s; `side` picks the cell when s lies on
/// a cell interface.
inline double basis_deriv(const TensorMesh& mesh, int j, double s, Side side) {
  detail::check_node_index(mesh, j, "basis_deriv");
  detail::check_coord(s, "basis_deriv");
  return detail::lagrange_deriv_on_cell(mesh, j, mesh.cell_for_side(s, side),
                                        s);
}

/// Tensor-product basis value psi_{j1}(x_1) * psi_{j2}(x_2).
inline double multi_basis_eval(const TensorMesh& mesh, const DofIndex& dof,
                               const Point& x) {
  double v = basis_eval(mesh, dof.j1, x[0]);
  if (mesh.dim() == 2) v *= basis_eval(mesh, dof.j2, x[1]);
  return v;
}

/// Nodal interpolation onto the multi-cubic space: coefficient per dof is
/// the sampled value at its node.
inline Eigen::VectorXd interpolate(
    const TensorMesh& mesh, const std::function<double(const Point&)>& values) {
  Eigen::VectorXd coeff(mesh.n_dofs());
  const int n1 = mesh.n_nodes_1d();
  for (int j1 = 0; j1 < n1; ++j1) {
    if (mesh.dim() == 1) {
      const double v = values({mesh.node(j1), 0.0});
      if (!std::isfinite(v)) {
        throw InvalidDataError("interpolate: non-finite sample at node " +
                               std::to_string(j1));
      }
      coeff[j1] = v;
      continue;
    }
    for (int j2 = 0; j2 < n1; ++j2) {
      const double v = values({mesh.node(j1), mesh.node(j2)});
      if (!std::isfinite(v)) {
        throw InvalidDataError("interpolate: non-finite sample at node (" +
                               std::to_string(j1) + "," + std::to_string(j2) +
                               ")");
      }
      coeff[mesh.linearize({j1, j2})] = v;
    }
  }
  return coeff;
}

/// Evaluate the multi-cubic function with the given coefficients at x.
inline double evaluate_field(const TensorMesh& mesh,
                             const Eigen::VectorXd& coeff, const Point& x) {
  const int i1 = mesh.cell_for_eval(x[0]);
  double value = 0.0;
  if (mesh.dim() == 1) {
    for (int j = 3 * i1; j <= 3 * i1 + 3; ++j) {
      value += coeff[j] * detail::lagrange_on_cell(mesh, j, i1, x[0]);
    }
    return value;
  }
  const int i2 = mesh.cell_for_eval(x[1]);
  for (int j1 = 3 * i1; j1 <= 3 * i1 + 3; ++j1) {
    const double v1 = detail::lagrange_on_cell(mesh, j1, i1, x[0]);
    for (int j2 = 3 * i2; j2 <= 3 * i2 + 3; ++j2) {
      value += coeff[mesh.linearize({j1, j2})] * v1 *
               detail::lagrange_on_cell(mesh, j2, i2, x[1]);
    }
  }
  return value;
}

}  // namespace nlbiharm
