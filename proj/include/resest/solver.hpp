#pragma once

#include <functional>
#include <string>
#include <vector>

#include "resest/admm.hpp"
#include "resest/losses.hpp"
#include "resest/ltv.hpp"

namespace resest {

/// V(Y, Z) = lambda sum_t phi_t(z_{t+1} - A_t z_t) + sum_t psi_t(y_t - C_t z_t).
struct ObjectiveSpec {
  LtvSystem sys;
  Matrix Y;
  LossFamily phi;  // T-1 members on R^n
  LossFamily psi;  // T members on R^ny
  double lambda = 1.0;
};

struct SolveReport {
  Matrix solution;
  double objective_value = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double primal_tolerance = 0.0;
  double dual_tolerance = 0.0;
  bool converged = false;
  /// False for the local (nonconvex) path: no global optimality claim.
  bool certified = true;
  SolverMethod method = SolverMethod::Auto;
  /// Smallest objective increase found along probe directions of size
  /// 1e-4 (1 + |z|_inf); values near zero suggest a non-unique minimizer.
  double flatness = 0.0;
  bool flat = false;
  int monotone_checks = 0;
  int monotone_violations = 0;
  std::vector<std::string> warnings;
};

double trajectory_objective(const ObjectiveSpec& obj, const Matrix& Z);

/// sum_t psi_t(y_t - M_t z) with M_t = C_t A_{t-1} ... A_0.
double initial_state_objective(const LtvSystem& sys, const Matrix& Y, const LossFamily& psi,
                               VectorRef z);

/// Minimizes V(Y, .) over n x T trajectories.
SolveReport solve_trajectory(const ObjectiveSpec& obj, const SolverOptions& opts = {});

/// Minimizes the initial-state objective; solution is n x 1.
SolveReport solve_initial_state(const LtvSystem& sys, const Matrix& Y, const LossFamily& psi,
                                const SolverOptions& opts = {});

/// Value and one subgradient of a (possibly nonconvex) objective.
using SubgradientOracle = std::function<double(const Vector& z, Vector* grad)>;

struct SubgradientResult {
  Vector z;
  double value = 0.0;
  int iterations = 0;
};

/// Polyak steps toward an adaptive target level (path-length halving rule).
/// Returns the best iterate seen.
SubgradientResult minimize_subgradient(const SubgradientOracle& f, const Vector& z0,
                                       int max_iterations, double tolerance);

/// Gradient/subgradient of the trajectory objective, vectorized column-major.
double trajectory_objective_with_subgradient(const ObjectiveSpec& obj, const Vector& z,
                                             Vector* grad);

}  // namespace resest
