#pragma once

// Direct solution of the assembled SPD system. Factorization is unpivoted
// Cholesky; a non-positive pivot is a hard error rather than a fallback,
// since the assembled matrix is positive definite for every valid input.

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "nlbiharm/assembly.hpp"
#include "nlbiharm/errors.hpp"

namespace nlbiharm {

struct SolutionField {
  Eigen::VectorXd coefficients;
  double residual_norm = 0.0;  ///< |A u - rhs| / |rhs|
};

inline SolutionField solve_spd(const LinearSystem& sys) {
  if (!sys.matrix.allFinite() || !sys.rhs.allFinite()) {
    throw InvalidDataError("solve_spd: non-finite system entries");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sys.matrix);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefiniteError(
        "solve_spd: Cholesky factorization hit a non-positive pivot");
  }
  Eigen::VectorXd u = llt.solve(sys.rhs);
  // one pass of iterative refinement with the same factorization
  Eigen::VectorXd residual = sys.rhs - sys.matrix * u;
  u += llt.solve(residual);
  residual = sys.rhs - sys.matrix * u;

  SolutionField out;
  out.coefficients = std::move(u);
  const double denom = sys.rhs.norm();
  out.residual_norm = denom > 0.0 ? residual.norm() / denom : residual.norm();
  if (!out.coefficients.allFinite()) {
    throw InvalidDataError("solve_spd: non-finite solution");
  }
  return out;
}

}  // namespace nlbiharm
