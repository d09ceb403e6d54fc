#pragma once

#include <cstddef>
#include <vector>

#include "gblstsvm/linalg.hpp"

namespace gblstsvm {

/// minimize 1/2 z'Qz + b'z with Q symmetric positive definite.
struct QpProblem {
  Matrix q;
  Vector b;

  /// Throws std::invalid_argument when Q is not square/symmetric (1e-10) or
  /// has a non-positive diagonal entry.
  void validate() const;
};

struct SolverConfig {
  double tolerance = 1e-8;     // stop when |Qz + b|_inf <= tolerance
  std::size_t max_sweeps = 0;  // 0 means 10 n + 1000
  double ridge = 1e-8;         // relative regularization for solve_spd
};

struct QpResult {
  Vector z;
  bool converged = false;
  std::size_t sweeps = 0;
  double grad_inf_norm = 0.0;
  /// 1/2 z'Qz + b'z after each sweep; monotone non-increasing.
  std::vector<double> objective_trace;
};

/// Solves (M + ridge * tr(M)/n * I) z = rhs through a Cholesky factorization.
/// Throws std::runtime_error (reporting the attempted ridge) when the
/// factorization fails even with the regularizer.
Vector solve_spd(const Matrix& m, const Vector& rhs, double ridge);

/// Cyclic single-coordinate minimization z_i <- z_i - (Q_i.z + b_i)/Q_ii.
/// The duals this serves have equality-constraint multipliers only, so z is
/// unconstrained and the minimizer is unique.
QpResult qp_coordinate_ascent(const QpProblem& p, const SolverConfig& cfg = {});

}  // namespace gblstsvm
