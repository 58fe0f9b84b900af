#include "resest/estimators.hpp"

#include "resest/error.hpp"

namespace resest {

const char* to_string(EstimatorTag tag) {
  switch (tag) {
    case EstimatorTag::E: return "E";
    case EstimatorTag::E0: return "E0";
    case EstimatorTag::OracleE: return "oracle-E";
    case EstimatorTag::OracleE0: return "oracle-E0";
    case EstimatorTag::LeastSquares: return "ls";
    case EstimatorTag::LeastSquaresOracle: return "oracle-ls";
  }
  return "unknown";
}

EstimatorTag parse_estimator(const std::string& name) {
  for (EstimatorTag t : {EstimatorTag::E, EstimatorTag::E0, EstimatorTag::OracleE,
                         EstimatorTag::OracleE0, EstimatorTag::LeastSquares,
                         EstimatorTag::LeastSquaresOracle}) {
    if (name == to_string(t)) return t;
  }
  throw InvalidArgument("unknown estimator '" + name +
                        "' (expected E, E0, ls, oracle-E, oracle-E0 or oracle-ls)");
}

EstimateResult estimate_E(const LtvSystem& sys, const Matrix& Y, const LossFamily& phi,
                          const LossFamily& psi, double lambda, const SolverOptions& opts) {
  EstimateResult res;
  res.tag = EstimatorTag::E;
  res.report = solve_trajectory(ObjectiveSpec{sys, Y, phi, psi, lambda}, opts);
  res.X_hat = res.report.solution;
  res.z0 = res.X_hat.col(0);
  res.objective = res.report.objective_value;
  return res;
}

EstimateResult estimate_E0(const LtvSystem& sys, const Matrix& Y, const LossFamily& psi,
                           const SolverOptions& opts) {
  EstimateResult res;
  res.tag = EstimatorTag::E0;
  res.report = solve_initial_state(sys, Y, psi, opts);
  res.z0 = res.report.solution.col(0);
  res.X_hat = free_trajectory(sys, res.z0);
  res.objective = res.report.objective_value;
  return res;
}

EstimateResult estimate_least_squares(const LtvSystem& sys, const Matrix& Y, double lambda,
                                      const SolverOptions& opts) {
  const int T = sys.horizon();
  EstimateResult res = estimate_E(sys, Y, LossFamily::identity(Loss::quadratic_identity(sys.n()), T - 1),
                                  LossFamily::identity(Loss::quadratic_identity(sys.ny()), T),
                                  lambda, opts);
  res.tag = EstimatorTag::LeastSquares;
  return res;
}

EstimateResult estimate_oracle(const LtvSystem& sys, const Matrix& Y, const Matrix& S_true,
                               EstimatorTag inner, const LossFamily& phi, const LossFamily& psi,
                               double lambda, const SolverOptions& opts) {
  if (S_true.rows() != Y.rows() || S_true.cols() != Y.cols()) {
    throw InvalidArgument("estimate_oracle: S must have the shape of Y");
  }
  const Matrix cleaned = Y - S_true;
  EstimateResult res;
  switch (inner) {
    case EstimatorTag::E:
      res = estimate_E(sys, cleaned, phi, psi, lambda, opts);
      res.tag = EstimatorTag::OracleE;
      break;
    case EstimatorTag::E0:
      res = estimate_E0(sys, cleaned, psi, opts);
      res.tag = EstimatorTag::OracleE0;
      break;
    case EstimatorTag::LeastSquares:
      res = estimate_least_squares(sys, cleaned, lambda, opts);
      res.tag = EstimatorTag::LeastSquaresOracle;
      break;
    default:
      throw InvalidArgument("estimate_oracle: inner estimator must be E, E0 or ls");
  }
  return res;
}

LossFamily normalized_output_family(const LtvSystem& sys, const Loss& base) {
  return LossFamily::diagonal(base, output_maps(sys, true).weights);
}

double spectral_norm(const Matrix& X) {
  if (X.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(X);
  return svd.singularValues()[0];
}

double relative_error(const Matrix& X_hat, const Matrix& X) {
  if (X_hat.rows() != X.rows() || X_hat.cols() != X.cols()) {
    throw InvalidArgument("relative_error: shape mismatch");
  }
  const double denom = spectral_norm(X);
  if (denom == 0.0) throw InvalidArgument("relative_error: undefined for X = 0");
  return spectral_norm(X_hat - X) / denom;
}

double max_column_error(const Matrix& X_hat, const Matrix& X) {
  if (X_hat.rows() != X.rows() || X_hat.cols() != X.cols()) {
    throw InvalidArgument("max_column_error: shape mismatch");
  }
  return X.cols() == 0 ? 0.0 : (X_hat - X).colwise().norm().maxCoeff();
}

}  // namespace resest
