#pragma once

#include <string>

#include "resest/losses.hpp"
#include "resest/ltv.hpp"
#include "resest/solver.hpp"

namespace resest {

enum class EstimatorTag { E, E0, OracleE, OracleE0, LeastSquares, LeastSquaresOracle };

const char* to_string(EstimatorTag tag);
/// Accepts E, E0, ls, oracle-E, oracle-E0, oracle-ls.
EstimatorTag parse_estimator(const std::string& name);

struct EstimateResult {
  Trajectory X_hat;
  Vector z0;  // X_hat.col(0)
  double objective = 0.0;
  SolveReport report;
  EstimatorTag tag = EstimatorTag::E;
};

/// Full-trajectory estimator: argmin over Z of the performance function.
EstimateResult estimate_E(const LtvSystem& sys, const Matrix& Y, const LossFamily& phi,
                          const LossFamily& psi, double lambda, const SolverOptions& opts = {});

/// Initial-state estimator; the trajectory follows the noise-free dynamics.
EstimateResult estimate_E0(const LtvSystem& sys, const Matrix& Y, const LossFamily& psi,
                           const SolverOptions& opts = {});

/// E with phi = psi = squared Euclidean norm, identity weights.
EstimateResult estimate_least_squares(const LtvSystem& sys, const Matrix& Y, double lambda,
                                      const SolverOptions& opts = {});

/// Subtracts the true sparse noise and runs `inner` (E, E0 or LeastSquares).
EstimateResult estimate_oracle(const LtvSystem& sys, const Matrix& Y, const Matrix& S_true,
                               EstimatorTag inner, const LossFamily& phi, const LossFamily& psi,
                               double lambda, const SolverOptions& opts = {});

/// psi_t(e) = base(V_t e) with the row-normalizing weights of the output maps.
LossFamily normalized_output_family(const LtvSystem& sys, const Loss& base);

/// ||X_hat - X||_2 / ||X||_2 (spectral norms). Throws for X = 0.
double relative_error(const Matrix& X_hat, const Matrix& X);

/// max_t ||x_hat_t - x_t||_2.
double max_column_error(const Matrix& X_hat, const Matrix& X);

double spectral_norm(const Matrix& X);

}  // namespace resest
