#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "resest/admm.hpp"
#include "resest/estimators.hpp"
#include "resest/ltv.hpp"

namespace resest {

enum class ExperimentKind { Fig1, Fig2, Fig3, Custom };

const char* to_string(ExperimentKind kind);
ExperimentKind parse_experiment(const std::string& name);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Fig1;
  LtvSystem sys = LtvSystem::lti(Matrix::Identity(1, 1), Matrix::Identity(1, 1), 1);
  bool normalize = true;  // row-normalized weights for E0
  int trials = 100;
  std::vector<double> sparsity_grid;
  std::vector<double> snr_grid;  // dB; empty means fixed amplitudes
  double lambda = 5000.0;
  std::vector<EstimatorTag> estimators;
  std::uint64_t seed = 1;
  double sigma = 100.0;                 // std. dev. of the sparse values
  double process_amplitude = 0.0;       // used when snr_grid is empty
  double measurement_amplitude = 0.0;
  SparsityMode mode = SparsityMode::Block;
  std::string phi = "quadratic";
  std::string psi = "l1";
  double success_tolerance = 1e-6;  // fig1: relative error for exact recovery
  int jobs = 1;
  SolverOptions solver;
};

/// Defaults of the named experiment on the two-state benchmark system.
ExperimentConfig default_config(ExperimentKind kind);

/// Overrides a default configuration with the keys of a JSON config file:
/// experiment, system (path), trials, sparsity_grid, snr_grid, lambda,
/// estimators, seed, sigma, process_amplitude, measurement_amplitude, mode,
/// phi, psi, success_tolerance, jobs, normalize. Without an "experiment"
/// key the defaults of `fallback` apply.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>",
                              ExperimentKind fallback = ExperimentKind::Custom);

/// Throws InvalidArgument on empty grids, trials < 1 or fractions outside [0, 1].
void validate(const ExperimentConfig& cfg);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string to_csv() const;
};

/// One Monte-Carlo draw. The generator is consumed in a fixed order (x0,
/// process noise, dense output noise, sparse noise), so trials with the same
/// seed share x0 and nested outlier supports across sparsity levels.
struct Trial {
  Vector x0;
  NoiseRealization noise;
  Simulation sim;
};

Trial draw_trial(const ExperimentConfig& cfg, std::uint64_t seed, double fraction,
                 double process_amplitude, double measurement_amplitude);
/// Amplitudes from the noise-free signal powers of the trial's x0.
Trial draw_trial_snr(const ExperimentConfig& cfg, std::uint64_t seed, double fraction,
                     double snr_db);

/// Seed of trial k under the configuration's base seed.
std::uint64_t trial_seed(const ExperimentConfig& cfg, int k);

/// Exact-recovery rate of E0 per sparsity level.
/// Columns: fraction, success_rate, trials, seed_base.
Table run_fig1(const ExperimentConfig& cfg);
/// Mean relative error per estimator and sparsity level.
/// Columns: fraction, <estimator>..., trials, seed_base.
Table run_fig2(const ExperimentConfig& cfg);
/// Mean relative error per estimator and SNR at a fixed sparsity.
/// Columns: snr_db, fraction, <estimator>..., trials, seed_base.
Table run_fig3(const ExperimentConfig& cfg);
/// Every (fraction, snr) pair, or every fraction with fixed amplitudes.
/// Columns: fraction, snr_db, <estimator>..., trials, seed_base.
Table run_custom(const ExperimentConfig& cfg);
Table run_experiment(const ExperimentConfig& cfg);

/// Column name of an estimator in the experiment tables.
std::string column_name(EstimatorTag tag);

/// Relative errors of the requested estimators on one trial, in order.
std::vector<double> evaluate_trial(const ExperimentConfig& cfg, const Trial& trial);

}  // namespace resest
