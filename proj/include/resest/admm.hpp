#pragma once

#include <Eigen/Sparse>
#include <cstdint>
#include <vector>

#include "resest/losses.hpp"

namespace resest {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class SolverMethod { Auto, Admm, ClosedForm, Lp, Subgradient, Exhaustive };

const char* to_string(SolverMethod method);

struct SolverOptions {
  double tolerance = 1e-8;           // absolute, on the inf-norm residuals
  double relative_tolerance = 0.0;   // added on top, scaled by the iterate size
  int max_iterations = 100000;
  double penalty = 1.0;              // initial ADMM rho
  bool adaptive_penalty = true;      // residual balancing
  int restarts = 5;                  // nonconvex subgradient path
  int verbosity = 0;
  bool check_monotone = false;
  std::uint64_t seed = 1;
  SolverMethod method = SolverMethod::Auto;
};

/// One nonsmooth term scale * loss(s_b) on rows [offset, offset + dim) of s.
struct AdmmBlock {
  int offset = 0;
  const Loss* loss = nullptr;
  double scale = 1.0;
};

/// min 0.5 z'Pz + q'z + sum_b g_b(s_b)  s.t.  s = L z + c.
/// P + L'L must be positive definite.
struct AdmmProblem {
  SparseMatrix P;
  Vector q;
  SparseMatrix L;
  Vector c;
  std::vector<AdmmBlock> blocks;
};

struct AdmmResult {
  Vector z;
  Vector s;
  Vector u;  // scaled multiplier
  int iterations = 0;
  double primal_residual = 0.0;  // ||Lz + c - s||_inf
  double dual_residual = 0.0;    // rho ||L'(s - s_prev)||_inf
  double primal_tolerance = 0.0;
  double dual_tolerance = 0.0;
  double rho = 1.0;
  bool converged = false;
  int monotone_checks = 0;
  int monotone_violations = 0;
};

AdmmResult solve_admm(const AdmmProblem& problem, const SolverOptions& opts);

}  // namespace resest
