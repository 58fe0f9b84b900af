#pragma once

#include <Eigen/Dense>
#include <vector>

#include "resest/losses.hpp"

namespace resest {

/// minimize c^T x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,
/// x_j >= 0 unless free[j].
struct LinearProgram {
  Vector c;
  Matrix A_eq;
  Vector b_eq;
  Matrix A_ub;
  Vector b_ub;
  std::vector<bool> free;  // empty: all variables nonnegative
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::IterationLimit;
  Vector x;
  double objective = 0.0;
  /// Multipliers y_eq, y_ub with c - A_eq^T y_eq - A_ub^T y_ub >= 0 on
  /// nonnegative variables; y_ub <= 0.
  Vector y_eq;
  Vector y_ub;
  int iterations = 0;
};

struct SimplexOptions {
  int max_iterations = 50000;
  double pivot_tolerance = 1e-9;
  double feasibility_tolerance = 1e-9;
  /// Degenerate pivots in a row before switching from Dantzig to Bland.
  int stall_limit = 50;
};

/// Dense two-phase tableau simplex.
LpResult solve_lp(const LinearProgram& lp, const SimplexOptions& opts = {});

struct LinfMinResult {
  Vector coeffs;        // one per basis row, coeffs[excluded] = 0
  double value = 0.0;   // ||coeffs||_inf
  double dual_value = 0.0;
  double residual = 0.0;  // ||target - sum coeffs_k basis_k||_inf
};

/// min ||lambda||_inf s.t. target = sum_k lambda_k basis.row(k),
/// lambda_excluded = 0 (pass -1 to exclude nothing). Throws Infeasible when
/// the target is outside the span, and PreconditionViolation if the result
/// fails the feasibility (1e-8) or duality-gap (1e-6) checks.
LinfMinResult linf_min(VectorRef target, const Matrix& basis, int excluded);

}  // namespace resest
