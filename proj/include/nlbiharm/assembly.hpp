#pragma once

// Discretization of the nonlocal quadratic energy
//
//   F(u) = \int_Omega g(x)^2 dx - 2 \int_Omega f u dx
//        + (1/xi) \int_{boundary} h(x)^2 dS
//
// over the multi-cubic space, where
//
//   g(x) = (1/delta^2) \int_Omega R_delta(x,y) (u(x)-u(y)) dy
//        - 2 \int_{boundary} Rbar_delta(x,y) b(y) dS(y)
//   h(x) = \int_Omega K_delta(x,y) (a(x)-u(y)) dy.
//
// Every inner integral against a basis function factorizes per dimension
// into 1D kernel-basis integrals that are precomputed once per outer
// coordinate (InnerTables). The outer quadrature uses the layered 15-point
// cell rule; g and h are affine in the coefficient vector, so the energy is
// a quadratic form u'Au - 2 rhs'u + constant accumulated from per-cell
// blocks of rows.

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nlbiharm/errors.hpp"
#include "nlbiharm/kernel.hpp"
#include "nlbiharm/mesh.hpp"
#include "nlbiharm/problems.hpp"
#include "nlbiharm/quadrature.hpp"

namespace nlbiharm {

/// Kernel-weighted moment of one basis function against one cell:
/// \int_{cell} exp(-eta^2 (s-t)^2) psi_j(t) dt, via the monomial expansion
/// of psi_j in r = t - s and the closed-form moments f_0..f_3.
inline double basis_kernel_integral_cell(const TensorMesh& mesh, int j,
                                         int cell, double s, double eta) {
  if (j < 3 * cell || j > 3 * cell + 3) return 0.0;
  const double sj = mesh.node(j);
  double den = 1.0;
  std::array<double, 3> shift{};  // s - n_k over the other three cell nodes
  int idx = 0;
  for (int m = 3 * cell; m <= 3 * cell + 3; ++m) {
    if (m == j) continue;
    den *= sj - mesh.node(m);
    shift[idx++] = s - mesh.node(m);
  }
  const double e1 = shift[0] + shift[1] + shift[2];
  const double e2 =
      shift[0] * shift[1] + shift[0] * shift[2] + shift[1] * shift[2];
  const double e3 = shift[0] * shift[1] * shift[2];
  const double lo = mesh.cell_left(cell) - s;
  const double hi = mesh.cell_right(cell) - s;
  return (gaussian_moment(3, eta, lo, hi) + e1 * gaussian_moment(2, eta, lo, hi) +
          e2 * gaussian_moment(1, eta, lo, hi) +
          e3 * gaussian_moment(0, eta, lo, hi)) /
         den;
}

/// \int_0^1 exp(-eta^2 (s-t)^2) psi_j(t) dt over the full support of psi_j.
inline double basis_kernel_integral(const TensorMesh& mesh, int j, double s,
                                    double eta) {
  detail::check_node_index(mesh, j, "basis_kernel_integral");
  detail::check_coord(s, "basis_kernel_integral");
  double value = 0.0;
  const int i_hi = j / 3;
  if (j % 3 == 0) {
    if (i_hi > 0) value += basis_kernel_integral_cell(mesh, j, i_hi - 1, s, eta);
    if (i_hi < mesh.n_cells())
      value += basis_kernel_integral_cell(mesh, j, i_hi, s, eta);
  } else {
    value += basis_kernel_integral_cell(mesh, j, i_hi, s, eta);
  }
  return value;
}

/// Separable 1D tables over the registered outer coordinates: the layered
/// quadrature points of every cell in cell order, followed by the boundary
/// coordinates 0 and 1. All kernel factors are stored without c_delta.
struct InnerTables {
  std::vector<double> coords;
  std::vector<double> weights;  ///< quadrature weights of the interior coords
  int points_per_cell = 15;
  int idx_zero = 0;
  int idx_one = 0;

  Eigen::MatrixXd I;      ///< coords x (3N+1): kernel-basis integrals
  Eigen::MatrixXd psi;    ///< coords x (3N+1): basis values
  Eigen::VectorXd mass1;  ///< f_0(eta, s-1, s)
  Eigen::VectorXd perp0;  ///< exp(-(eta s)^2), distance factor to 0
  Eigen::VectorXd perp1;  ///< exp(-(eta (1-s))^2), distance factor to 1

  // boundary normal-derivative data: endpoint values in 1D, per-edge nodal
  // interpolant plus its I-contraction in 2D
  double b0 = 0.0;
  double b1 = 0.0;
  std::array<Eigen::VectorXd, 4> edge_b;
  std::array<Eigen::VectorXd, 4> edge_source;  ///< B_e(s) = sum_j b_j I(s,j)

  int n_interior() const { return static_cast<int>(weights.size()); }

  /// Row of a registered coordinate; exact match required.
  int lookup(double coord) const {
    if (coord == 0.0) return idx_zero;
    if (coord == 1.0) return idx_one;
    const auto begin = coords.begin();
    const auto end = begin + n_interior();
    const auto it = std::lower_bound(begin, end, coord);
    if (it == end || *it != coord) {
      throw std::invalid_argument(
          "InnerTables: coordinate is not a registered outer point");
    }
    return static_cast<int>(it - begin);
  }
};

/// Precompute all separable tables for one (mesh, kernel, problem) triple.
inline InnerTables build_inner_tables(const TensorMesh& mesh,
                                      const KernelParams& kernel,
                                      const ManufacturedProblem& problem) {
  const int n1 = mesh.n_nodes_1d();
  const int n_cells = mesh.n_cells();
  InnerTables T;
  T.coords.reserve(15 * n_cells + 2);
  T.weights.reserve(15 * n_cells);
  for (int i = 0; i < n_cells; ++i) {
    const QuadRule rule =
        layered_cell_rule(mesh.cell_left(i), mesh.cell_right(i), kernel.delta);
    T.coords.insert(T.coords.end(), rule.points.begin(), rule.points.end());
    T.weights.insert(T.weights.end(), rule.weights.begin(), rule.weights.end());
  }
  T.idx_zero = static_cast<int>(T.coords.size());
  T.coords.push_back(0.0);
  T.idx_one = static_cast<int>(T.coords.size());
  T.coords.push_back(1.0);

  const int nc = static_cast<int>(T.coords.size());
  T.I.setZero(nc, n1);
  T.psi.setZero(nc, n1);
  T.mass1.resize(nc);
  T.perp0.resize(nc);
  T.perp1.resize(nc);
  const double eta = kernel.eta;
  for (int r = 0; r < nc; ++r) {
    const double s = T.coords[r];
    for (int j = 0; j < n1; ++j) {
      T.I(r, j) = basis_kernel_integral(mesh, j, s, eta);
    }
    const int cell = mesh.cell_for_eval(s);
    for (int j = 3 * cell; j <= 3 * cell + 3; ++j) {
      T.psi(r, j) = detail::lagrange_on_cell(mesh, j, cell, s);
    }
    T.mass1[r] = gaussian_moment(0, eta, s - 1.0, s);
    T.perp0[r] = std::exp(-(eta * s) * (eta * s));
    T.perp1[r] = std::exp(-(eta * (1.0 - s)) * (eta * (1.0 - s)));
  }

  if (mesh.dim() == 1) {
    T.b0 = problem.b_end(0);
    T.b1 = problem.b_end(1);
    if (!std::isfinite(T.b0) || !std::isfinite(T.b1)) {
      throw InvalidDataError("build_inner_tables: non-finite boundary data");
    }
  } else {
    for (int e = 0; e < 4; ++e) {
      Eigen::VectorXd be(n1);
      for (int j = 0; j < n1; ++j) {
        be[j] = problem.b_edge(e, mesh.node(j));
        if (!std::isfinite(be[j])) {
          throw InvalidDataError(
              "build_inner_tables: non-finite boundary data on edge " +
              std::to_string(e));
        }
      }
      T.edge_source[e] = T.I * be;
      T.edge_b[e] = std::move(be);
    }
  }
  return T;
}

namespace detail {

using RowMajorMap =
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>>;

/// G_b(x): the boundary normal-derivative source at outer point
/// (coords[r1], coords[r2]); r2 is ignored in 1D.
inline double boundary_source_at(const InnerTables& T,
                                 const KernelParams& kernel, int r1, int r2) {
  if (kernel.dim == 1) {
    return 0.5 * kernel.c_delta *
           (T.perp0[r1] * T.b0 + T.perp1[r1] * T.b1);
  }
  return 0.5 * kernel.c_delta *
         (T.perp0[r1] * T.edge_source[0][r2] +
          T.perp1[r1] * T.edge_source[1][r2] +
          T.perp0[r2] * T.edge_source[2][r1] +
          T.perp1[r2] * T.edge_source[3][r1]);
}

/// Domain mass at a registered point, c_delta * prod_i f_0 factors.
inline double mass_at(const InnerTables& T, const KernelParams& kernel, int r1,
                      int r2) {
  double m = kernel.c_delta * T.mass1[r1];
  if (kernel.dim == 2) m *= T.mass1[r2];
  return m;
}

/// Write scale * G(x) into dest for the registered outer point (r1[,r2]).
inline void g_row_into(const InnerTables& T, const KernelParams& kernel,
                       const TensorMesh& mesh, int r1, int r2, double scale,
                       Eigen::Ref<Eigen::VectorXd> dest) {
  const double kappa = scale * kernel.c_delta / (kernel.delta * kernel.delta);
  const int n1 = mesh.n_nodes_1d();
  if (kernel.dim == 1) {
    dest = kappa * (T.mass1[r1] * T.psi.row(r1) - T.I.row(r1)).transpose();
    return;
  }
  RowMajorMap dm(dest.data(), n1, n1);
  dm.noalias() = (-kappa) * (T.I.row(r1).transpose() * T.I.row(r2));
  const double mm = kappa * T.mass1[r1] * T.mass1[r2];
  const int c1 = mesh.cell_for_eval(T.coords[r1]);
  const int c2 = mesh.cell_for_eval(T.coords[r2]);
  for (int j1 = 3 * c1; j1 <= 3 * c1 + 3; ++j1) {
    const double v1 = mm * T.psi(r1, j1);
    for (int j2 = 3 * c2; j2 <= 3 * c2 + 3; ++j2) {
      dm(j1, j2) += v1 * T.psi(r2, j2);
    }
  }
}

/// Write scale * H(x) into dest for a boundary point: 1D endpoint `end`, or
/// the 2D point on `edge` with registered tangential row rt.
inline void h_row_into(const InnerTables& T, const KernelParams& kernel,
                       const TensorMesh& mesh, int edge, int rt, double scale,
                       Eigen::Ref<Eigen::VectorXd> dest) {
  const double c = scale * kernel.c_delta;
  if (kernel.dim == 1) {
    const int r = (edge == 0) ? T.idx_zero : T.idx_one;
    dest = c * T.I.row(r).transpose();
    return;
  }
  const int n1 = mesh.n_nodes_1d();
  const int rf = (edge == 0 || edge == 2) ? T.idx_zero : T.idx_one;
  RowMajorMap dm(dest.data(), n1, n1);
  if (edge <= 1) {  // x1 frozen, tangential coordinate is x2
    dm.noalias() = c * (T.I.row(rf).transpose() * T.I.row(rt));
  } else {  // x2 frozen
    dm.noalias() = c * (T.I.row(rt).transpose() * T.I.row(rf));
  }
}

/// Mass factor k(x) at a boundary point addressed as in h_row_into.
inline double boundary_mass_at(const InnerTables& T,
                               const KernelParams& kernel, int edge, int rt) {
  if (kernel.dim == 1) {
    return kernel.c_delta * T.mass1[(edge == 0) ? T.idx_zero : T.idx_one];
  }
  const int rf = (edge == 0 || edge == 2) ? T.idx_zero : T.idx_one;
  return kernel.c_delta * T.mass1[rf] * T.mass1[rt];
}

/// A(lower) += B * B'. Fixed column panels of roughly equal area so the
/// result is independent of the number of threads.
inline void lower_rank_update(Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const Eigen::Index n = A.rows();
  constexpr int kPanels = 16;
  std::array<Eigen::Index, kPanels + 1> edge{};
  for (int p = 0; p <= kPanels; ++p) {
    const double frac = static_cast<double>(p) / kPanels;
    edge[p] = static_cast<Eigen::Index>(
        std::llround(n * (1.0 - std::sqrt(1.0 - frac))));
  }
  edge[0] = 0;
  edge[kPanels] = n;
#pragma omp parallel for schedule(static)
  for (int p = 0; p < kPanels; ++p) {
    const Eigen::Index c0 = edge[p];
    const Eigen::Index w = edge[p + 1] - c0;
    if (w <= 0) continue;
    A.block(c0, c0, n - c0, w).noalias() +=
        B.middleRows(c0, n - c0) * B.middleRows(c0, w).transpose();
  }
}

inline void check_block_finite(const Eigen::MatrixXd& B,
                               const Eigen::VectorXd& d,
                               const InnerTables& T, int dim,
                               const int* rows_per_col) {
  if (B.allFinite() && d.allFinite()) return;
  for (Eigen::Index q = 0; q < B.cols(); ++q) {
    if (B.col(q).allFinite() && std::isfinite(d[q])) continue;
    const int r1 = rows_per_col[2 * q];
    const int r2 = rows_per_col[2 * q + 1];
    std::string where = "x = (" + std::to_string(T.coords[r1]);
    if (dim == 2) where += ", " + std::to_string(T.coords[r2]);
    where += ")";
    throw AssemblyError("assemble_system: non-finite row at quadrature point " +
                        where);
  }
  throw AssemblyError("assemble_system: non-finite accumulation");
}

}  // namespace detail

/// Dense symmetric system of the discretized energy: the minimizer solves
/// matrix * u = rhs, and u'Au - 2 rhs'u + constant reproduces the
/// discretized functional value exactly.
struct LinearSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
  double constant = 0.0;
  int dim = 1;
  int n_cells = 1;
  double delta = 0.0;
  double xi = 0.0;
};

/// Row G(x) and source G_b(x) at a registered outer quadrature point;
/// g(x) of a coefficient vector u is dot(G(x), u) - G_b(x).
struct GRow {
  Eigen::VectorXd row;
  double source = 0.0;
};

/// Row H(x) and mass k(x) at a registered boundary point; h(x) of a
/// coefficient vector u is a(x) * k(x) - dot(H(x), u).
struct HRow {
  Eigen::VectorXd row;
  double mass = 0.0;
};

inline GRow eval_g_row(const InnerTables& T, const KernelParams& kernel,
                       const TensorMesh& mesh, const Point& x) {
  const int r1 = T.lookup(x[0]);
  const int r2 = (mesh.dim() == 2) ? T.lookup(x[1]) : 0;
  GRow out;
  out.row.resize(mesh.n_dofs());
  detail::g_row_into(T, kernel, mesh, r1, r2, 1.0, out.row);
  out.source = detail::boundary_source_at(T, kernel, r1, r2);
  return out;
}

inline HRow eval_h_row(const InnerTables& T, const KernelParams& kernel,
                       const TensorMesh& mesh, const Point& x) {
  HRow out;
  out.row.resize(mesh.n_dofs());
  if (mesh.dim() == 1) {
    if (x[0] != 0.0 && x[0] != 1.0) {
      throw std::invalid_argument("eval_h_row: point is not on the boundary");
    }
    const int end = (x[0] == 0.0) ? 0 : 1;
    detail::h_row_into(T, kernel, mesh, end, 0, 1.0, out.row);
    out.mass = detail::boundary_mass_at(T, kernel, end, 0);
    return out;
  }
  int edge = -1;
  double t = 0.0;
  if (x[0] == 0.0 || x[0] == 1.0) {
    edge = (x[0] == 0.0) ? 0 : 1;
    t = x[1];
  } else if (x[1] == 0.0 || x[1] == 1.0) {
    edge = (x[1] == 0.0) ? 2 : 3;
    t = x[0];
  } else {
    throw std::invalid_argument("eval_h_row: point is not on the boundary");
  }
  const int rt = T.lookup(t);
  detail::h_row_into(T, kernel, mesh, edge, rt, 1.0, out.row);
  out.mass = detail::boundary_mass_at(T, kernel, edge, rt);
  return out;
}

/// Assemble the SPD system of the discretized energy with penalty weight xi.
inline LinearSystem assemble_system(const TensorMesh& mesh,
                                    const KernelParams& kernel,
                                    const ManufacturedProblem& problem,
                                    double xi) {
  if (!(xi > 0.0)) {
    throw std::invalid_argument("assemble_system: xi must be positive");
  }
  if (kernel.dim != mesh.dim() || problem.dim != mesh.dim()) {
    throw std::invalid_argument("assemble_system: dimension mismatch");
  }
  const InnerTables T = build_inner_tables(mesh, kernel, problem);
  const Eigen::Index n = mesh.n_dofs();
  const int n_cells = mesh.n_cells();
  const int ppc = T.points_per_cell;

  LinearSystem sys;
  sys.matrix.setZero(n, n);
  sys.rhs.setZero(n);
  sys.constant = 0.0;
  sys.dim = mesh.dim();
  sys.n_cells = n_cells;
  sys.delta = kernel.delta;
  sys.xi = xi;

  const double inv_xi = 1.0 / xi;

  if (mesh.dim() == 1) {
    Eigen::MatrixXd B(n, ppc);
    Eigen::VectorXd d(ppc);
    std::vector<int> where(2 * ppc, 0);
    for (int i = 0; i < n_cells; ++i) {
      for (int q = 0; q < ppc; ++q) {
        const int r = i * ppc + q;
        const double w = T.weights[r];
        const double sw = std::sqrt(w);
        detail::g_row_into(T, kernel, mesh, r, 0, sw, B.col(q));
        const double gb = detail::boundary_source_at(T, kernel, r, 0);
        d[q] = sw * gb;
        sys.constant += w * gb * gb;
        where[2 * q] = r;
        where[2 * q + 1] = r;
      }
      detail::check_block_finite(B, d, T, 1, where.data());
      detail::lower_rank_update(sys.matrix, B);
      sys.rhs.noalias() += B * d;
    }
    // two-point boundary penalty, unit weights
    Eigen::MatrixXd Hb(n, 1);
    for (int end = 0; end < 2; ++end) {
      const double sw = std::sqrt(inv_xi);
      detail::h_row_into(T, kernel, mesh, end, 0, sw, Hb.col(0));
      const double ak = problem.a({end == 0 ? 0.0 : 1.0, 0.0}) *
                        detail::boundary_mass_at(T, kernel, end, 0);
      detail::lower_rank_update(sys.matrix, Hb);
      sys.rhs.noalias() += Hb.col(0) * (sw * ak);
      sys.constant += inv_xi * ak * ak;
    }
  } else {
    const int block = ppc * ppc;
    Eigen::MatrixXd B(n, block);
    Eigen::VectorXd d(block);
    std::vector<int> where(2 * block, 0);
    for (int c1 = 0; c1 < n_cells; ++c1) {
      for (int c2 = 0; c2 < n_cells; ++c2) {
        for (int q1 = 0; q1 < ppc; ++q1) {
          const int r1 = c1 * ppc + q1;
          for (int q2 = 0; q2 < ppc; ++q2) {
            const int r2 = c2 * ppc + q2;
            const int q = q1 * ppc + q2;
            const double w = T.weights[r1] * T.weights[r2];
            const double sw = std::sqrt(w);
            detail::g_row_into(T, kernel, mesh, r1, r2, sw, B.col(q));
            const double gb = detail::boundary_source_at(T, kernel, r1, r2);
            d[q] = sw * gb;
            sys.constant += w * gb * gb;
            where[2 * q] = r1;
            where[2 * q + 1] = r2;
          }
        }
        detail::check_block_finite(B, d, T, 2, where.data());
        detail::lower_rank_update(sys.matrix, B);
        sys.rhs.noalias() += B * d;
      }
    }
    // penalty over the four boundary edges, one layered rule per edge cell
    Eigen::MatrixXd Hb(n, ppc);
    Eigen::VectorXd dp(ppc);
    for (int edge = 0; edge < 4; ++edge) {
      for (int i = 0; i < n_cells; ++i) {
        for (int q = 0; q < ppc; ++q) {
          const int rt = i * ppc + q;
          const double w = T.weights[rt];
          const double sw = std::sqrt(w * inv_xi);
          detail::h_row_into(T, kernel, mesh, edge, rt, sw, Hb.col(q));
          const double ak = problem.a(edge_point(edge, T.coords[rt])) *
                            detail::boundary_mass_at(T, kernel, edge, rt);
          dp[q] = sw * ak;
          sys.constant += w * inv_xi * ak * ak;
          where[2 * q] = rt;
          where[2 * q + 1] = rt;
        }
        detail::check_block_finite(Hb, dp, T, 2, where.data());
        detail::lower_rank_update(sys.matrix, Hb);
        sys.rhs.noalias() += Hb * dp;
      }
    }
  }

  // load term: Simpson 3/8 nodes coincide with the basis nodes
  const Eigen::VectorXd ws = simpson_node_weights(mesh);
  const int n1 = mesh.n_nodes_1d();
  if (mesh.dim() == 1) {
    for (int j = 0; j < n1; ++j) {
      sys.rhs[j] += ws[j] * problem.f({mesh.node(j), 0.0});
    }
  } else {
    for (int j1 = 0; j1 < n1; ++j1) {
      for (int j2 = 0; j2 < n1; ++j2) {
        sys.rhs[mesh.linearize({j1, j2})] +=
            ws[j1] * ws[j2] * problem.f({mesh.node(j1), mesh.node(j2)});
      }
    }
  }

  // mirror the accumulated lower triangle; the matrix is symmetric by
  // construction, this makes it bit-exact
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      sys.matrix(i, j) = sys.matrix(j, i);
    }
  }
  if (!sys.rhs.allFinite() || !std::isfinite(sys.constant)) {
    throw AssemblyError("assemble_system: non-finite right-hand side");
  }
  return sys;
}

/// Discretized functional value through the quadratic form.
inline double functional_value(const LinearSystem& sys,
                               const Eigen::VectorXd& u) {
  return u.dot(sys.matrix * u) - 2.0 * sys.rhs.dot(u) + sys.constant;
}

/// Discretized functional value by direct quadrature: every g and h row is
/// re-formed at its quadrature point and squared against u. Matches
/// functional_value(assemble_system(...), u) up to roundoff.
inline double evaluate_functional(const TensorMesh& mesh,
                                  const KernelParams& kernel,
                                  const ManufacturedProblem& problem, double xi,
                                  const Eigen::VectorXd& u) {
  if (!(xi > 0.0)) {
    throw std::invalid_argument("evaluate_functional: xi must be positive");
  }
  const InnerTables T = build_inner_tables(mesh, kernel, problem);
  const int n_cells = mesh.n_cells();
  const int ppc = T.points_per_cell;
  Eigen::VectorXd row(mesh.n_dofs());
  double interior = 0.0;
  double penalty = 0.0;
  double load = 0.0;

  if (mesh.dim() == 1) {
    for (int r = 0; r < T.n_interior(); ++r) {
      detail::g_row_into(T, kernel, mesh, r, 0, 1.0, row);
      const double g =
          row.dot(u) - detail::boundary_source_at(T, kernel, r, 0);
      interior += T.weights[r] * g * g;
    }
    for (int end = 0; end < 2; ++end) {
      detail::h_row_into(T, kernel, mesh, end, 0, 1.0, row);
      const double ak = problem.a({end == 0 ? 0.0 : 1.0, 0.0}) *
                        detail::boundary_mass_at(T, kernel, end, 0);
      const double h = ak - row.dot(u);
      penalty += h * h;
    }
  } else {
    for (int r1 = 0; r1 < T.n_interior(); ++r1) {
      for (int r2 = 0; r2 < T.n_interior(); ++r2) {
        detail::g_row_into(T, kernel, mesh, r1, r2, 1.0, row);
        const double g =
            row.dot(u) - detail::boundary_source_at(T, kernel, r1, r2);
        interior += T.weights[r1] * T.weights[r2] * g * g;
      }
    }
    for (int edge = 0; edge < 4; ++edge) {
      for (int i = 0; i < n_cells; ++i) {
        for (int q = 0; q < ppc; ++q) {
          const int rt = i * ppc + q;
          detail::h_row_into(T, kernel, mesh, edge, rt, 1.0, row);
          const double ak = problem.a(edge_point(edge, T.coords[rt])) *
                            detail::boundary_mass_at(T, kernel, edge, rt);
          const double h = ak - row.dot(u);
          penalty += T.weights[rt] * h * h;
        }
      }
    }
  }

  const Eigen::VectorXd ws = simpson_node_weights(mesh);
  const int n1 = mesh.n_nodes_1d();
  if (mesh.dim() == 1) {
    for (int j = 0; j < n1; ++j) {
      load += ws[j] * problem.f({mesh.node(j), 0.0}) * u[j];
    }
  } else {
    for (int j1 = 0; j1 < n1; ++j1) {
      for (int j2 = 0; j2 < n1; ++j2) {
        load += ws[j1] * ws[j2] * problem.f({mesh.node(j1), mesh.node(j2)}) *
                u[mesh.linearize({j1, j2})];
      }
    }
  }
  return interior - 2.0 * load + penalty / xi;
}

/// Plain-text system dump: "<dim> <n>" header, rhs entries, then the lower
/// triangle row by row, 17 significant digits.
inline void dump_system(const LinearSystem& sys, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("dump_system: cannot open " + path);
  }
  const Eigen::Index n = sys.matrix.rows();
  char buf[32];
  out << sys.dim << ' ' << n << '\n';
  for (Eigen::Index i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", sys.rhs[i]);
    out << buf << '\n';
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", sys.matrix(i, j));
      out << buf << (j == i ? '\n' : ' ');
    }
  }
  if (!out) {
    throw IoError("dump_system: write failure on " + path);
  }
}

}  // namespace nlbiharm
