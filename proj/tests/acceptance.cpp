// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "resest/certificates.hpp"
#include "resest/estimators.hpp"
#include "resest/experiments.hpp"
#include "resest/io.hpp"
#include "resest/solver.hpp"

using namespace resest;
using namespace testing_helpers;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Column of a table by header name, parsed as doubles.
std::vector<double> column(const Table& t, const std::string& name) {
  const auto it = std::find(t.header.begin(), t.header.end(), name);
  const auto k = static_cast<std::size_t>(it - t.header.begin());
  std::vector<double> out;
  for (const auto& r : t.rows) out.push_back(std::stod(r.at(k)));
  return out;
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * (i + j);
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a), rb = ranks(b);
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / ra.size();
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / rb.size();
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

const Loss kL1 = Loss::norm_power(Norm::L1, 1.0, 1);

void criterion1() {
  const auto t0 = Clock::now();
  const OutputMaps maps = output_maps(benchmark_system(100), true);
  const NuProfile prof = nu_exact(maps, kL1);
  const RMax lp = r_max_from_nu0(nu0(maps).value);
  const int r_max = std::max(prof.r_max(), lp.value);
  const double secs = seconds_since(t0);
  report(1, r_max == 30 && secs <= 30.0,
         "r_max=" + std::to_string(r_max) + " (lp bound " + std::to_string(lp.value) + ")" +
             fmt(", %.2f s", secs));
}

void criterion2() {
  const auto t0 = Clock::now();
  ExperimentConfig cfg = default_config(ExperimentKind::Fig1);
  cfg.sparsity_grid = {0.3};
  const Table t = run_fig1(cfg);
  const double rate = column(t, "success_rate").at(0);
  const double secs = seconds_since(t0);
  report(2, rate == 1.0 && secs <= 120.0, fmt("success rate %.2f at fraction 0.30", rate) + fmt(", %.1f s", secs));
}

void criterion3() {
  const ExperimentConfig cfg = default_config(ExperimentKind::Fig1);
  const Table t = run_fig1(cfg);
  const auto f = column(t, "fraction");
  const auto s = column(t, "success_rate");
  double at05 = -1, at08 = -1;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::abs(f[i] - 0.5) < 1e-9) at05 = s[i];
    if (std::abs(f[i] - 0.8) < 1e-9) at08 = s[i];
  }
  // Non-increasing when compared two grid steps apart; adjacent points may swap.
  bool monotone = true;
  for (std::size_t i = 0; i + 2 < s.size(); ++i) monotone = monotone && s[i + 2] <= s[i];
  std::string curve;
  for (double v : s) curve += fmt(" %.2f", v);
  report(3, at05 >= 0.9 && at08 <= 0.5 && monotone,
         fmt("success %.2f at 0.5 (need >= 0.90), ", at05) + fmt("%.2f at 0.8 (need <= 0.50), ", at08) +
             (monotone ? "monotone" : "not monotone") + "; curve" + curve);
}

void criterion4() {
  const auto t0 = Clock::now();
  const Table t = run_fig2(default_config(ExperimentKind::Fig2));
  const double secs = seconds_since(t0);
  const auto f = column(t, "fraction");
  const auto e = column(t, "E");
  const auto o = column(t, "oracle_E");
  bool close = true;
  double worst = 0, e02 = 0, e08 = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] <= 0.4 + 1e-9) {
      worst = std::max(worst, e[i] / o[i]);
      close = close && e[i] <= 10 * o[i];
    }
    if (std::abs(f[i] - 0.2) < 1e-9) e02 = e[i];
    if (std::abs(f[i] - 0.8) < 1e-9) e08 = e[i];
  }
  report(4, close && e08 > 10 * e02 && secs <= 1200.0,
         fmt("max E/oracle-E ratio %.2f for fractions <= 0.4, ", worst) +
             fmt("E(0.8)/E(0.2) = %.2f (need > 10)", e08 / e02) + fmt(", %.0f s", secs));
}

void criterion5() {
  const auto t0 = Clock::now();
  const Table t = run_fig3(default_config(ExperimentKind::Fig3));
  const double secs = seconds_since(t0);
  const auto snr = column(t, "snr_db");
  const auto e = column(t, "E"), e0 = column(t, "E0");
  const auto oe = column(t, "oracle_E"), oe0 = column(t, "oracle_E0");
  const double rho_e = spearman(snr, e), rho_e0 = spearman(snr, e0);
  double worst_e = 0, worst_e0 = 0;
  for (std::size_t i = 0; i < snr.size(); ++i) {
    worst_e = std::max(worst_e, std::max(e[i] / oe[i], oe[i] / e[i]));
    worst_e0 = std::max(worst_e0, std::max(e0[i] / oe0[i], oe0[i] / e0[i]));
  }
  report(5, rho_e <= -0.9 && rho_e0 <= -0.9 && worst_e <= 10 && worst_e0 <= 10 && secs <= 1200.0,
         fmt("Spearman E %.3f, ", rho_e) + fmt("E0 %.3f; ", rho_e0) + fmt("max oracle ratio E %.2f, ", worst_e) +
             fmt("E0 %.2f", worst_e0) + fmt(", %.0f s", secs));
}

void criterion6() {
  Rng rng(606);
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    const LtvSystem sys = random_ltv(rng, 2, 1, 20);
    const Matrix Y = gaussian(rng, 1, 20);
    const double lambda = rng.uniform(0.1, 100.0);
    const ObjectiveSpec spec{sys, Y, LossFamily::identity(Loss::quadratic_identity(2), 19),
                             LossFamily::identity(Loss::quadratic_identity(1), 20), lambda};
    const SolveReport r = solve_trajectory(spec);
    const Matrix Z = dense_quadratic_oracle(sys, Y, Matrix::Identity(2, 2), Matrix::Identity(1, 1), lambda);
    worst = std::max(worst, (r.solution - Z).norm() / Z.norm());
  }
  report(6, worst <= 1e-6, fmt("max relative deviation %.2e over 20 instances", worst));
}

void criterion7() {
  const auto t0 = Clock::now();
  const int T = 5;
  const LtvSystem sys = LtvSystem::lti(Matrix::Ones(1, 1), Matrix::Ones(1, 1), T);
  const LossFamily psi = LossFamily::identity(kL1, T);
  const OutputMaps maps = output_maps(sys, false);
  // Brute force: scalar directions are +-1, so nu_r is the largest share of any r-subset.
  std::vector<double> nu(T + 1, 0.0);
  for (int mask = 0; mask < (1 << T); ++mask) {
    double top = 0, total = 0;
    for (int t = 0; t < T; ++t) {
      const double v = std::abs(maps.M[t](0, 0));
      total += v;
      if (mask >> t & 1) top += v;
    }
    const int r = __builtin_popcount(static_cast<unsigned>(mask));
    nu[r] = std::max(nu[r], top / total);
  }
  bool ok = true;
  std::string detail;
  int first_bad = -1;
  const double x0 = 1.3;
  const std::vector<double> mags = {-1e6, -50.0, -1.0, 0.01, 2.0, 75.0, 1e5};
  int recovered = 0, cases = 0;
  for (int r = 1; r <= T; ++r) {
    if (nu[r] >= 0.5) {
      first_bad = r;
      break;
    }
    for (int mask = 0; mask < (1 << T); ++mask) {
      if (__builtin_popcount(static_cast<unsigned>(mask)) != r) continue;
      for (double m : mags) {
        Matrix Y = Matrix::Constant(1, T, x0);
        for (int t = 0; t < T; ++t) {
          if (mask >> t & 1) Y(0, t) += m;
        }
        ++cases;
        const EstimateResult e = estimate_E0(sys, Y, psi);
        if (std::abs(e.z0(0) - x0) <= 1e-9 * std::abs(x0)) ++recovered;
      }
    }
  }
  ok = recovered == cases && first_bad > 0;
  // The constructed attack for the first r with nu_r >= 1/2: zero data on an r-subset.
  bool defeated = false;
  if (first_bad > 0) {
    Matrix Y = Matrix::Constant(1, T, x0);
    for (int t = 0; t < first_bad; ++t) Y(0, t) = 0.0;
    const EstimateResult e = estimate_E0(sys, Y, psi);
    defeated = std::abs(e.z0(0) - x0) > 1e-6;
  }
  ok = ok && defeated;
  const double secs = seconds_since(t0);
  ok = ok && secs <= 60.0;
  detail = std::to_string(recovered) + "/" + std::to_string(cases) + " attacks recovered below the threshold; r=" +
           std::to_string(first_bad) + fmt(" (nu=%.2f) ", first_bad > 0 ? nu[first_bad] : NAN) +
           (defeated ? "defeated by the constructed attack" : "not defeated") + fmt(", %.2f s", secs);
  report(7, ok, detail);
}

void criterion8() {
  Rng rng(808);
  const int T = 10;
  bool lp_ok = true, pr_ok = true, l0_ok = true, part_ok = true;
  double pr_gap = 0;
  for (int k = 0; k < 20; ++k) {
    const LtvSystem sys = random_ltv(rng, 2, 1, T);
    const OutputMaps maps = output_maps(sys, false);
    const NuProfile nb = nu_brute(maps, kL1, 20000);
    const double v0 = nu0(maps).value;
    const LossFamily phi = LossFamily::identity(Loss::parse("l1", 2), T - 1);
    const LossFamily psi = LossFamily::identity(kL1, T);
    PrSampleOptions po;
    po.seed = static_cast<std::uint64_t>(k + 1);
    const std::vector<double> pr = p_r_sample(sys, phi, psi, 1.0, PartitionMode::Block, po);
    const int m = mu(maps, false).value;
    const NuProfile l0 = nu_brute(maps, Loss::block_l0(1), 20000);
    for (int r = 1; r <= T; ++r) {
      lp_ok = lp_ok && nb.nu[r] <= nu_upper(v0, r) + 1e-12;
      // Both sides are sampled lower estimates of suprema.
      pr_gap = std::max(pr_gap, nb.nu[r] - pr[r]);
      pr_ok = pr_ok && nb.nu[r] <= pr[r] + 1e-3;
      l0_ok = l0_ok && l0.nu[r] <= static_cast<double>(r) / (T - m + 1) + 1e-12;
    }
    // Partition identity on a random noise draw.
    const Matrix F = gaussian(rng, 1, T);
    const Matrix W = gaussian(rng, 2, T - 1, 0.1);
    const double eps = rng.uniform(0.0, 1.5);
    const EpsilonPartition p = partition(F, psi, eps, PartitionMode::Block, W, phi, 2.0);
    part_ok = part_ok && p.beta <= p.process + p.T_eps.size() * eps + 1e-12;
  }
  // GTI and growth-homogeneity suites.
  bool gti_ok = true;
  const Loss l1 = Loss::norm_power(Norm::L1, 1.0, 2);
  const std::vector<Loss> kinds = {
      l1, Loss::norm_power(Norm::L2, 1.0, 2), Loss::norm_power(Norm::Linf, 1.0, 2),
      Loss::norm_power(Norm::L2, 0.5, 2), Loss::norm_power(Norm::L1, 2.5, 2), Loss::quadratic_identity(2),
      Loss::saturated(l1, 1.5), Loss::exp_saturated(Loss::quadratic_identity(2)), Loss::block_l0(2),
      Loss::entry_l0(2)};
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    Rng r(derive_seed(809, i));
    gti_ok = gti_ok && verify_gti(kinds[i], gti_constant(kinds[i]), 10000, r);
    gti_ok = gti_ok && verify_gh(kinds[i], 10000, r);
  }
  report(8, lp_ok && pr_ok && l0_ok && part_ok && gti_ok,
         std::string("nu <= r nu0/(1+nu0): ") + (lp_ok ? "ok" : "violated") + "; nu <= p_r: " +
             (pr_ok ? "ok" : "violated") + fmt(" (max gap %.1e)", pr_gap) + "; l0 bound: " +
             (l0_ok ? "ok" : "violated") + "; partition: " + (part_ok ? "ok" : "violated") +
             "; GTI/GH suites: " + (gti_ok ? "ok" : "violated"));
}

void criterion9() {
  Rng rng(909);
  const int T = 12;
  int instances = 0, attempts = 0;
  double worst = 0;
  bool ok = true;
  while (instances < 20 && attempts < 200) {
    ++attempts;
    const LtvSystem sys = random_ltv(rng, 2, 1, T);
    const OutputMaps maps = output_maps(sys, true);
    const NuProfile prof = nu_exact(maps, kL1);
    const int r = std::min(prof.r_max(), 3);
    if (r < 1) continue;
    ++instances;
    NoiseRealization noise = NoiseRealization::zero(sys);
    noise.W = gen_dense_noise(rng, 0.05, 2, T - 1);
    noise.Vd = gen_dense_noise(rng, 0.05, 1, T);
    for (int t : rng.sample_without_replacement(T, r)) noise.S(0, t) = 20.0 * rng.normal();
    const Vector x0 = gaussian(rng, 2, 1);
    const Simulation s = simulate(sys, x0, noise);
    const LossFamily psi = normalized_output_family(sys, kL1);
    const EstimateResult e = estimate_E0(sys, s.Y, psi);
    const Vector e0 = e.z0 - x0;
    // Psi(e0) = sum_t psi_t(M_t e0).
    double lhs = 0;
    for (int t = 0; t < T; ++t) lhs += psi.eval(t, maps.M[t] * e0);
    // f~ = f + propagated process noise, split at the (r+1)-th largest value.
    const Matrix ft = noise.total_output_noise() + propagated_output_noise(sys, noise.W);
    std::vector<double> vals(T);
    for (int t = 0; t < T; ++t) vals[t] = psi.eval(t, ft.col(t));
    std::vector<double> sorted = vals;
    std::sort(sorted.rbegin(), sorted.rend());
    const double eps = sorted[r];
    double inl = 0;
    int out = 0;
    for (double v : vals) {
      if (v <= eps) {
        inl += v;
      } else {
        ++out;
      }
    }
    const double nu_r = prof.nu[out];
    const double rhs = 2.0 / (1.0 - 2.0 * nu_r) * inl;
    worst = std::max(worst, lhs / rhs);
    ok = ok && lhs <= rhs * (1 + 1e-9) + 1e-12;
  }
  ok = ok && instances == 20;
  report(9, ok, std::to_string(instances) + " instances, max lhs/rhs " + fmt("%.3f", worst));
}

}  // namespace

int main(int argc, char** argv) {
  // Optional list of criteria to run, e.g. `acceptance 1 6 7`.
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const std::vector<std::function<void()>> all = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                  criterion6, criterion7, criterion8, criterion9};
  for (int k = 1; k <= 9; ++k) {
    if (only.empty() || std::find(only.begin(), only.end(), k) != only.end()) all[k - 1]();
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
