// resest: simulate, estimate, certify and run the Monte-Carlo experiments.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <cmath>

#include "resest/certificates.hpp"
#include "resest/error.hpp"
#include "resest/estimators.hpp"
#include "resest/experiments.hpp"
#include "resest/io.hpp"

using namespace resest;

namespace {

struct SolverFlags {
  double tolerance = 1e-8;
  int max_iterations = 100000;
  double penalty = 1.0;
  int restarts = 5;
  int verbosity = 0;

  void add(CLI::App* app) {
    app->add_option("--tolerance", tolerance, "Solver residual tolerance")->capture_default_str();
    app->add_option("--max-iterations", max_iterations, "Solver iteration cap")->capture_default_str();
    app->add_option("--penalty", penalty, "Initial ADMM penalty")->capture_default_str();
    app->add_option("--restarts", restarts, "Restarts for nonconvex losses")->capture_default_str();
    app->add_option("--verbosity", verbosity, "Solver diagnostics on stderr (0-2)")->capture_default_str();
  }
  SolverOptions options(std::uint64_t seed) const {
    SolverOptions o;
    o.tolerance = tolerance;
    o.max_iterations = max_iterations;
    o.penalty = penalty;
    o.restarts = restarts;
    o.verbosity = verbosity;
    o.seed = seed;
    return o;
  }
};

/// `--out` if given, else $RESEST_OUTPUT_DIR/<fallback>, else stdout ("").
std::string resolve_output(const std::string& out, const std::string& fallback) {
  if (!out.empty()) return out;
  if (const char* dir = std::getenv("RESEST_OUTPUT_DIR"); dir && *dir) {
    return std::string(dir) + "/" + fallback;
  }
  return "";
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

std::string kv(const std::string& key, const std::string& value) { return key + "=" + value + "\n"; }

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_double(v[i]);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resilient state estimation for LTV systems under sparse attacks"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Draw one noisy trajectory and write it as CSV");
  std::string sim_system, sim_out, sim_mode = "block";
  double sim_fraction = 0.0, sim_sigma = 100.0, sim_aw = 0.0, sim_av = 0.0, sim_snr = NAN;
  std::uint64_t sim_seed = 1;
  sim->add_option("--system", sim_system, "System file (JSON)")->required();
  sim->add_option("--fraction", sim_fraction, "Sparse-noise fraction")->capture_default_str();
  sim->add_option("--sigma", sim_sigma, "Std. dev. of sparse values")->capture_default_str();
  sim->add_option("--mode", sim_mode, "block or entry")->check(CLI::IsMember({"block", "entry"}));
  sim->add_option("--process-amplitude", sim_aw, "Uniform process-noise bound")->capture_default_str();
  sim->add_option("--measurement-amplitude", sim_av, "Uniform output-noise bound")->capture_default_str();
  sim->add_option("--snr", sim_snr, "Joint SNR in dB (overrides the amplitudes)");
  sim->add_option("--seed", sim_seed, "Seed")->capture_default_str();
  sim->add_option("--out", sim_out, "Output CSV (default: stdout)");

  // estimate
  auto* est = app.add_subcommand("estimate", "Run one estimator on a data file");
  std::string est_system, est_data, est_out, est_name = "E", est_phi = "quadratic", est_psi = "l1";
  double est_lambda = 5000.0;
  std::uint64_t est_seed = 1;
  SolverFlags est_flags;
  est->add_option("--system", est_system, "System file (JSON)")->required();
  est->add_option("--data", est_data, "Data CSV (t, x_*, y_*, s_*)")->required();
  est->add_option("--estimator", est_name, "E, E0, ls, oracle-E, oracle-E0 or oracle-ls")
      ->capture_default_str();
  est->add_option("--phi", est_phi, "Process loss tag")->capture_default_str();
  est->add_option("--psi", est_psi, "Output loss tag")->capture_default_str();
  est->add_option("--lambda", est_lambda, "Process weight")->capture_default_str();
  est->add_option("--seed", est_seed, "Seed for randomized solvers")->capture_default_str();
  est->add_option("--out", est_out, "Estimated trajectory CSV");
  est_flags.add(est);

  // certify
  auto* cert = app.add_subcommand("certify", "Compute resilience certificates for a system");
  std::string cert_system, cert_psi = "l1", cert_out;
  bool cert_normalize = false, cert_raw = false;
  int cert_brute = -1, cert_grid = 100000;
  cert->add_option("--system", cert_system, "System file (JSON)")->required();
  cert->add_flag("--normalize", cert_normalize, "Row-normalized weights (default: file setting)");
  cert->add_flag("--no-normalize", cert_raw, "Identity weights");
  cert->add_option("--psi", cert_psi, "Output loss tag")->capture_default_str();
  cert->add_option("--brute", cert_brute, "Also report the grid estimate of nu_r for this r");
  cert->add_option("--grid", cert_grid, "Grid resolution for the sampled quantities")->capture_default_str();
  cert->add_option("--out", cert_out, "Write the CSV row here as well");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Monte-Carlo experiments (CSV output)");
  std::string exp_name, exp_config, exp_out;
  std::uint64_t exp_seed = 1;
  int exp_trials = -1, exp_jobs = 1;
  SolverFlags exp_flags;
  exp->add_option("name", exp_name, "fig1, fig2, fig3 or custom")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2", "fig3", "custom"}));
  exp->add_option("--config", exp_config, "JSON config overriding the defaults");
  exp->add_option("--seed", exp_seed, "Base seed")->capture_default_str();
  exp->add_option("--trials", exp_trials, "Trials per grid point");
  exp->add_option("--jobs", exp_jobs, "Worker threads")->capture_default_str();
  exp->add_option("--out", exp_out, "Output CSV (default: $RESEST_OUTPUT_DIR/<name>.csv or stdout)");
  exp_flags.add(exp);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const SystemDescription d = load_system(sim_system);
      ExperimentConfig cfg = default_config(ExperimentKind::Custom);
      cfg.sys = d.sys;
      cfg.sigma = sim_sigma;
      cfg.mode = sim_mode == "block" ? SparsityMode::Block : SparsityMode::Entry;
      const Trial tr = std::isnan(sim_snr)
                           ? draw_trial(cfg, sim_seed, sim_fraction, sim_aw, sim_av)
                           : draw_trial_snr(cfg, sim_seed, sim_fraction, sim_snr);
      const Dataset data{tr.sim.X, tr.sim.Y, tr.noise.S};
      emit(sim_out, dataset_to_csv(data));
      return 0;
    }

    if (*est) {
      const SystemDescription d = load_system(est_system);
      const Dataset data = load_dataset(est_data);
      const LtvSystem& sys = d.sys;
      if (data.Y.rows() != sys.ny() || data.Y.cols() != sys.horizon()) {
        throw IoError(est_data + ": data shape does not match the system");
      }
      const EstimatorTag tag = parse_estimator(est_name);
      const int T = sys.horizon();
      const LossFamily phi = LossFamily::identity(Loss::parse(est_phi, sys.n()), T - 1);
      const Loss psi_base = Loss::parse(est_psi, sys.ny());
      const LossFamily psi = LossFamily::identity(psi_base, T);
      const LossFamily psi0 =
          d.normalize ? normalized_output_family(sys, psi_base) : LossFamily::identity(psi_base, T);
      const SolverOptions opts = est_flags.options(est_seed);
      const bool oracle = tag == EstimatorTag::OracleE || tag == EstimatorTag::OracleE0 ||
                          tag == EstimatorTag::LeastSquaresOracle;
      if (oracle && data.S.size() == 0) throw IoError(est_data + ": oracle estimators need s_* columns");
      EstimateResult r;
      switch (tag) {
        case EstimatorTag::E: r = estimate_E(sys, data.Y, phi, psi, est_lambda, opts); break;
        case EstimatorTag::E0: r = estimate_E0(sys, data.Y, psi0, opts); break;
        case EstimatorTag::LeastSquares: r = estimate_least_squares(sys, data.Y, est_lambda, opts); break;
        case EstimatorTag::OracleE:
          r = estimate_oracle(sys, data.Y, data.S, EstimatorTag::E, phi, psi, est_lambda, opts);
          break;
        case EstimatorTag::OracleE0:
          r = estimate_oracle(sys, data.Y, data.S, EstimatorTag::E0, phi, psi0, est_lambda, opts);
          break;
        case EstimatorTag::LeastSquaresOracle:
          r = estimate_oracle(sys, data.Y, data.S, EstimatorTag::LeastSquares, phi, psi, est_lambda, opts);
          break;
      }
      std::string report;
      report += kv("estimator", to_string(r.tag));
      report += kv("method", to_string(r.report.method));
      report += kv("objective", format_double(r.objective));
      report += kv("iterations", std::to_string(r.report.iterations));
      report += kv("converged", r.report.converged ? "true" : "false");
      report += kv("certified", r.report.certified ? "true" : "false");
      report += kv("flat", r.report.flat ? "true" : "false");
      std::vector<double> z0(r.z0.data(), r.z0.data() + r.z0.size());
      report += kv("z0", join(z0));
      if (data.X.size() && data.X.rows() == sys.n()) {
        report += kv("relative_error", format_double(relative_error(r.X_hat, data.X)));
        report += kv("max_column_error", format_double(max_column_error(r.X_hat, data.X)));
      }
      for (const auto& w : r.report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      std::cout << report;
      if (!est_out.empty()) {
        std::string csv = "t";
        for (int i = 0; i < sys.n(); ++i) csv += ",xhat_" + std::to_string(i);
        csv += "\n";
        for (int t = 0; t < T; ++t) {
          csv += std::to_string(t);
          for (int i = 0; i < sys.n(); ++i) csv += "," + format_double(r.X_hat(i, t));
          csv += "\n";
        }
        write_file(est_out, csv);
      }
      return r.report.converged ? 0 : 3;
    }

    if (*cert) {
      const SystemDescription d = load_system(cert_system);
      const bool normalize = cert_raw ? false : (cert_normalize || d.normalize);
      const LtvSystem& sys = d.sys;
      const OutputMaps maps = output_maps(sys, normalize);
      const Loss psi = Loss::parse(cert_psi, sys.ny());
      const Nu0Result n0 = nu0(maps);
      const RMax rlp = r_max_from_nu0(n0.value);
      const MuResult m = mu(maps, false);
      const MuResult me = mu(maps, true);
      std::string text;
      text += kv("n", std::to_string(sys.n()));
      text += kv("ny", std::to_string(sys.ny()));
      text += kv("T", std::to_string(sys.horizon()));
      text += kv("normalize", normalize ? "true" : "false");
      text += kv("psi", psi.tag());
      text += kv("nu0", format_double(n0.value));
      text += kv("nu0_argmax", std::to_string(n0.argmax));
      text += kv("r_max_lp", rlp.unbounded ? "unbounded" : std::to_string(rlp.value));
      int r_max = rlp.value;
      std::string r_source = "lp";
      double nu_at_rmax = NAN, nu_next = NAN;
      try {
        const NuProfile prof = nu_exact(maps, psi);
        r_max = std::max(prof.r_max(), rlp.unbounded ? 0 : rlp.value);
        r_source = "exact";
        nu_at_rmax = prof.nu[r_max];
        if (r_max + 1 < static_cast<int>(prof.nu.size())) nu_next = prof.nu[r_max + 1];
      } catch (const UnsupportedOperation&) {
      }
      text += kv("r_max", std::to_string(r_max));
      text += kv("r_max_source", r_source);
      text += kv("nu_r_max", format_double(nu_at_rmax));
      text += kv("nu_r_max_plus_1", format_double(nu_next));
      text += kv("mu", std::to_string(m.value));
      text += kv("mu_entry", std::to_string(me.value));
      text += kv("l0_tolerance", std::to_string(l0_tolerance(sys.horizon(), m.value)));
      text += kv("sensor_tolerance", std::to_string(sensor_tolerance(sys.ny())));
      double d1 = NAN;
      double brute = NAN;
      if (sys.n() <= 3) {
        const D1Result dr = D1(maps, psi, cert_grid);
        d1 = dr.value;
        text += kv("D1", format_double(d1));
        text += kv("grid", std::to_string(cert_grid));
        if (cert_brute >= 0) {
          if (cert_brute > sys.horizon()) throw InvalidArgument("--brute r exceeds the horizon");
          brute = nu_brute(maps, psi, cert_brute, cert_grid);
          text += kv("nu_brute", format_double(brute));
          text += kv("nu_upper", format_double(nu_upper(n0.value, cert_brute)));
        }
      }
      const std::string header = "n,ny,T,normalize,psi,nu0,r_max,r_max_lp,mu,mu_entry,D1,grid,brute_r,nu_brute";
      const std::string row = csv_row({std::to_string(sys.n()), std::to_string(sys.ny()),
                                       std::to_string(sys.horizon()), normalize ? "1" : "0", psi.tag(),
                                       format_double(n0.value), std::to_string(r_max),
                                       std::to_string(rlp.value), std::to_string(m.value),
                                       std::to_string(me.value), format_double(d1),
                                       std::to_string(cert_grid), std::to_string(cert_brute),
                                       format_double(brute)});
      std::cout << text << "\n" << header << "\n" << row << "\n";
      if (!cert_out.empty()) write_file(cert_out, header + "\n" + row + "\n");
      return 0;
    }

    if (*exp) {
      const ExperimentKind kind = parse_experiment(exp_name);
      ExperimentConfig cfg = exp_config.empty() ? default_config(kind)
                                                : parse_config(read_file(exp_config), exp_config, kind);
      cfg.experiment = kind;
      if (exp->count("--seed") || exp_config.empty()) cfg.seed = exp_seed;
      if (exp_trials > 0) cfg.trials = exp_trials;
      if (exp->count("--jobs")) cfg.jobs = exp_jobs;
      cfg.solver = exp_flags.options(cfg.seed);
      const Table tab = run_experiment(cfg);
      emit(resolve_output(exp_out, exp_name + ".csv"), tab.to_csv());
      return 0;
    }
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
