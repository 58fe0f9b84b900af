#include "resest/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <json.hpp>
#include <thread>

#include "resest/error.hpp"
#include "resest/io.hpp"

namespace resest {

namespace {

// Grid points and rates read better without round-off digits.
std::string format_short(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

std::vector<double> linear_grid(double lo, double hi, double step) {
  std::vector<double> g;
  const int count = static_cast<int>(std::lround((hi - lo) / step));
  for (int k = 0; k <= count; ++k) g.push_back(std::round((lo + k * step) * 1e12) / 1e12);
  return g;
}

/// Runs `body(k)` for k in [0, count) on `jobs` threads; results by index.
template <class F>
auto parallel_map(int count, int jobs, F body) -> std::vector<decltype(body(0))> {
  std::vector<decltype(body(0))> out(count);
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int k = 0; k < count; ++k) out[k] = body(k);
    return out;
  }
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) {
    pool.emplace_back([&, j] {
      try {
        for (int k = j; k < count; k += jobs) out[k] = body(k);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<std::string> estimator_columns(const ExperimentConfig& cfg) {
  std::vector<std::string> cols;
  for (auto e : cfg.estimators) cols.push_back(column_name(e));
  return cols;
}

/// Mean of the per-trial error vectors, one entry per estimator.
std::vector<double> mean_errors(const std::vector<std::vector<double>>& per_trial, std::size_t width) {
  std::vector<double> mean(width, 0.0);
  for (const auto& v : per_trial) {
    for (std::size_t i = 0; i < width; ++i) mean[i] += v[i];
  }
  for (auto& m : mean) m /= static_cast<double>(per_trial.size());
  return mean;
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Fig1: return "fig1";
    case ExperimentKind::Fig2: return "fig2";
    case ExperimentKind::Fig3: return "fig3";
    case ExperimentKind::Custom: return "custom";
  }
  return "unknown";
}

ExperimentKind parse_experiment(const std::string& name) {
  for (auto k : {ExperimentKind::Fig1, ExperimentKind::Fig2, ExperimentKind::Fig3,
                 ExperimentKind::Custom}) {
    if (name == to_string(k)) return k;
  }
  throw InvalidArgument("unknown experiment '" + name + "' (expected fig1, fig2, fig3 or custom)");
}

std::string column_name(EstimatorTag tag) {
  switch (tag) {
    case EstimatorTag::E: return "E";
    case EstimatorTag::E0: return "E0";
    case EstimatorTag::OracleE: return "oracle_E";
    case EstimatorTag::OracleE0: return "oracle_E0";
    case EstimatorTag::LeastSquares: return "ls";
    case EstimatorTag::LeastSquaresOracle: return "ls_oracle";
  }
  return "unknown";
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.experiment = kind;
  cfg.sys = benchmark_system(100);
  cfg.sparsity_grid = linear_grid(0.0, 0.8, 0.05);
  const std::vector<EstimatorTag> all{EstimatorTag::E, EstimatorTag::E0, EstimatorTag::OracleE,
                                      EstimatorTag::OracleE0, EstimatorTag::LeastSquaresOracle};
  switch (kind) {
    case ExperimentKind::Fig1:
      cfg.estimators = {EstimatorTag::E0};
      break;
    case ExperimentKind::Fig2:
      cfg.lambda = 5000.0;
      cfg.process_amplitude = 0.03;
      cfg.measurement_amplitude = 0.1;
      cfg.estimators = all;
      break;
    case ExperimentKind::Fig3:
      cfg.lambda = 1e5;
      cfg.sparsity_grid = {0.2};
      cfg.snr_grid = linear_grid(5.0, 100.0, 5.0);
      cfg.estimators = all;
      break;
    case ExperimentKind::Custom:
      cfg.process_amplitude = 0.03;
      cfg.measurement_amplitude = 0.1;
      cfg.estimators = all;
      break;
  }
  return cfg;
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin, ExperimentKind fallback) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(origin + ": " + e.what());
  }
  try {
    ExperimentConfig cfg =
        default_config(j.contains("experiment") ? parse_experiment(j["experiment"].get<std::string>()) : fallback);
    if (j.contains("system")) {
      const SystemDescription d = load_system(j["system"].get<std::string>());
      cfg.sys = d.sys;
      cfg.normalize = d.normalize;
    }
    if (j.contains("normalize")) cfg.normalize = j["normalize"].get<bool>();
    if (j.contains("trials")) cfg.trials = j["trials"].get<int>();
    if (j.contains("sparsity_grid")) cfg.sparsity_grid = j["sparsity_grid"].get<std::vector<double>>();
    if (j.contains("snr_grid")) cfg.snr_grid = j["snr_grid"].get<std::vector<double>>();
    if (j.contains("lambda")) cfg.lambda = j["lambda"].get<double>();
    if (j.contains("estimators")) {
      cfg.estimators.clear();
      for (const auto& e : j["estimators"]) cfg.estimators.push_back(parse_estimator(e.get<std::string>()));
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("sigma")) cfg.sigma = j["sigma"].get<double>();
    if (j.contains("process_amplitude")) cfg.process_amplitude = j["process_amplitude"].get<double>();
    if (j.contains("measurement_amplitude")) {
      cfg.measurement_amplitude = j["measurement_amplitude"].get<double>();
    }
    if (j.contains("mode")) {
      const auto m = j["mode"].get<std::string>();
      if (m != "block" && m != "entry") throw InvalidArgument("mode must be 'block' or 'entry'");
      cfg.mode = m == "block" ? SparsityMode::Block : SparsityMode::Entry;
    }
    if (j.contains("phi")) cfg.phi = j["phi"].get<std::string>();
    if (j.contains("psi")) cfg.psi = j["psi"].get<std::string>();
    if (j.contains("success_tolerance")) cfg.success_tolerance = j["success_tolerance"].get<double>();
    if (j.contains("jobs")) cfg.jobs = j["jobs"].get<int>();
    return cfg;
  } catch (const json::exception& e) {
    throw IoError(origin + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw IoError(origin + ": " + e.what());
  }
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw InvalidArgument("config: trials must be at least 1");
  if (cfg.sparsity_grid.empty()) throw InvalidArgument("config: sparsity grid is empty");
  for (double f : cfg.sparsity_grid) {
    if (!(f >= 0.0 && f <= 1.0)) throw InvalidArgument("config: sparsity fractions must lie in [0, 1]");
  }
  if (cfg.experiment == ExperimentKind::Fig3 && cfg.snr_grid.empty()) {
    throw InvalidArgument("config: SNR grid is empty");
  }
  if (cfg.experiment != ExperimentKind::Fig1 && cfg.estimators.empty()) {
    throw InvalidArgument("config: no estimators selected");
  }
  if (!(cfg.lambda > 0.0)) throw InvalidArgument("config: lambda must be positive");
  if (!(cfg.sigma >= 0.0)) throw InvalidArgument("config: sigma must be nonnegative");
  if (!(cfg.process_amplitude >= 0.0) || !(cfg.measurement_amplitude >= 0.0)) {
    throw InvalidArgument("config: noise amplitudes must be nonnegative");
  }
  if (cfg.jobs < 1) throw InvalidArgument("config: jobs must be at least 1");
  if (!is_observable(cfg.sys)) throw InvalidArgument("config: the system is not observable");
  Loss::parse(cfg.phi, cfg.sys.n());
  Loss::parse(cfg.psi, cfg.sys.ny());
}

std::string Table::to_csv() const {
  std::string out = csv_row(header) + "\n";
  for (const auto& r : rows) out += csv_row(r) + "\n";
  return out;
}

std::uint64_t trial_seed(const ExperimentConfig& cfg, int k) {
  return derive_seed(cfg.seed, static_cast<std::uint64_t>(k));
}

namespace {

Trial draw(const ExperimentConfig& cfg, std::uint64_t seed, double fraction, bool snr, double a_w,
           double a_v, double snr_db) {
  const LtvSystem& sys = cfg.sys;
  const int n = sys.n(), ny = sys.ny(), T = sys.horizon();
  Rng rng(seed);
  Trial tr;
  tr.x0.resize(n);
  for (int i = 0; i < n; ++i) tr.x0[i] = rng.normal();
  if (snr) {
    const Trajectory X = free_trajectory(sys, tr.x0);
    Matrix CX(ny, T);
    for (int t = 0; t < T; ++t) CX.col(t) = sys.C(t) * X.col(t);
    a_w = snr_to_amplitude(mean_power(X), snr_db);
    a_v = snr_to_amplitude(mean_power(CX), snr_db);
  }
  tr.noise.seed = seed;
  tr.noise.W = gen_dense_noise(rng, a_w, n, T - 1);
  tr.noise.Vd = gen_dense_noise(rng, a_v, ny, T);
  tr.noise.S = gen_sparse_noise(rng, T, ny, fraction, cfg.sigma, cfg.mode);
  tr.sim = simulate(sys, tr.x0, tr.noise);
  return tr;
}

}  // namespace

Trial draw_trial(const ExperimentConfig& cfg, std::uint64_t seed, double fraction,
                 double process_amplitude, double measurement_amplitude) {
  return draw(cfg, seed, fraction, false, process_amplitude, measurement_amplitude, 0.0);
}

Trial draw_trial_snr(const ExperimentConfig& cfg, std::uint64_t seed, double fraction,
                     double snr_db) {
  return draw(cfg, seed, fraction, true, 0.0, 0.0, snr_db);
}

std::vector<double> evaluate_trial(const ExperimentConfig& cfg, const Trial& tr) {
  const LtvSystem& sys = cfg.sys;
  const int T = sys.horizon();
  const LossFamily phi = LossFamily::identity(Loss::parse(cfg.phi, sys.n()), T - 1);
  const Loss psi_base = Loss::parse(cfg.psi, sys.ny());
  const LossFamily psi = LossFamily::identity(psi_base, T);
  const LossFamily psi0 =
      cfg.normalize ? normalized_output_family(sys, psi_base) : LossFamily::identity(psi_base, T);
  const Matrix& Y = tr.sim.Y;
  const Matrix& S = tr.noise.S;
  std::vector<double> errs;
  for (auto tag : cfg.estimators) {
    EstimateResult r;
    switch (tag) {
      case EstimatorTag::E: r = estimate_E(sys, Y, phi, psi, cfg.lambda, cfg.solver); break;
      case EstimatorTag::E0: r = estimate_E0(sys, Y, psi0, cfg.solver); break;
      case EstimatorTag::OracleE:
        r = estimate_oracle(sys, Y, S, EstimatorTag::E, phi, psi, cfg.lambda, cfg.solver);
        break;
      case EstimatorTag::OracleE0:
        r = estimate_oracle(sys, Y, S, EstimatorTag::E0, phi, psi0, cfg.lambda, cfg.solver);
        break;
      case EstimatorTag::LeastSquares: r = estimate_least_squares(sys, Y, cfg.lambda, cfg.solver); break;
      case EstimatorTag::LeastSquaresOracle:
        r = estimate_oracle(sys, Y, S, EstimatorTag::LeastSquares, phi, psi, cfg.lambda, cfg.solver);
        break;
    }
    errs.push_back(relative_error(r.X_hat, tr.sim.X));
  }
  return errs;
}

Table run_fig1(const ExperimentConfig& cfg) {
  validate(cfg);
  const LtvSystem& sys = cfg.sys;
  const Loss psi_base = Loss::parse(cfg.psi, sys.ny());
  const LossFamily psi0 = cfg.normalize ? normalized_output_family(sys, psi_base)
                                        : LossFamily::identity(psi_base, sys.horizon());
  Table tab;
  tab.header = {"fraction", "success_rate", "trials", "seed_base"};
  for (double f : cfg.sparsity_grid) {
    const auto ok = parallel_map(cfg.trials, cfg.jobs, [&](int k) {
      const Trial tr = draw_trial(cfg, trial_seed(cfg, k), f, 0.0, 0.0);
      const EstimateResult r = estimate_E0(sys, tr.sim.Y, psi0, cfg.solver);
      return relative_error(r.X_hat, tr.sim.X) <= cfg.success_tolerance ? 1 : 0;
    });
    int successes = 0;
    for (int s : ok) successes += s;
    tab.rows.push_back({format_short(f), format_short(static_cast<double>(successes) / cfg.trials),
                        std::to_string(cfg.trials), std::to_string(cfg.seed)});
  }
  return tab;
}

Table run_fig2(const ExperimentConfig& cfg) {
  validate(cfg);
  Table tab;
  tab.header = {"fraction"};
  for (const auto& c : estimator_columns(cfg)) tab.header.push_back(c);
  tab.header.insert(tab.header.end(), {"trials", "seed_base"});
  for (double f : cfg.sparsity_grid) {
    const auto errs = parallel_map(cfg.trials, cfg.jobs, [&](int k) {
      return evaluate_trial(cfg, draw_trial(cfg, trial_seed(cfg, k), f, cfg.process_amplitude,
                                            cfg.measurement_amplitude));
    });
    std::vector<std::string> row{format_short(f)};
    for (double m : mean_errors(errs, cfg.estimators.size())) row.push_back(format_double(m));
    row.insert(row.end(), {std::to_string(cfg.trials), std::to_string(cfg.seed)});
    tab.rows.push_back(std::move(row));
  }
  return tab;
}

Table run_fig3(const ExperimentConfig& cfg) {
  validate(cfg);
  Table tab;
  tab.header = {"snr_db", "fraction"};
  for (const auto& c : estimator_columns(cfg)) tab.header.push_back(c);
  tab.header.insert(tab.header.end(), {"trials", "seed_base"});
  const double f = cfg.sparsity_grid.front();
  for (double snr : cfg.snr_grid) {
    const auto errs = parallel_map(cfg.trials, cfg.jobs, [&](int k) {
      return evaluate_trial(cfg, draw_trial_snr(cfg, trial_seed(cfg, k), f, snr));
    });
    std::vector<std::string> row{format_short(snr), format_short(f)};
    for (double m : mean_errors(errs, cfg.estimators.size())) row.push_back(format_double(m));
    row.insert(row.end(), {std::to_string(cfg.trials), std::to_string(cfg.seed)});
    tab.rows.push_back(std::move(row));
  }
  return tab;
}

Table run_custom(const ExperimentConfig& cfg) {
  validate(cfg);
  Table tab;
  tab.header = {"fraction", "snr_db"};
  for (const auto& c : estimator_columns(cfg)) tab.header.push_back(c);
  tab.header.insert(tab.header.end(), {"trials", "seed_base"});
  const bool snr_mode = !cfg.snr_grid.empty();
  const std::vector<double> snrs = snr_mode ? cfg.snr_grid : std::vector<double>{0.0};
  for (double f : cfg.sparsity_grid) {
    for (double snr : snrs) {
      const auto errs = parallel_map(cfg.trials, cfg.jobs, [&](int k) {
        const std::uint64_t s = trial_seed(cfg, k);
        return evaluate_trial(cfg, snr_mode ? draw_trial_snr(cfg, s, f, snr)
                                            : draw_trial(cfg, s, f, cfg.process_amplitude,
                                                         cfg.measurement_amplitude));
      });
      std::vector<std::string> row{format_short(f), snr_mode ? format_short(snr) : "nan"};
      for (double m : mean_errors(errs, cfg.estimators.size())) row.push_back(format_double(m));
      row.insert(row.end(), {std::to_string(cfg.trials), std::to_string(cfg.seed)});
      tab.rows.push_back(std::move(row));
    }
  }
  return tab;
}

Table run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case ExperimentKind::Fig1: return run_fig1(cfg);
    case ExperimentKind::Fig2: return run_fig2(cfg);
    case ExperimentKind::Fig3: return run_fig3(cfg);
    case ExperimentKind::Custom: return run_custom(cfg);
  }
  throw InvalidArgument("unknown experiment");
}

}  // namespace resest
