#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "resest/losses.hpp"
#include "resest/ltv.hpp"
#include "resest/rng.hpp"

namespace resest {

/// nu[r], r = 0..T: worst-case share of the initial-state cost carried by r
/// of the T blocks, sup_z top_r(psi_t(V_t M_t z)) / sum_t psi_t(V_t M_t z).
struct NuProfile {
  std::vector<double> nu;
  Vector argmax;       // direction attaining the largest nu[r] found for the last r
  long directions = 0; // directions evaluated
  bool exact = false;  // true when computed by vertex enumeration
  int grid = 0;        // grid resolution for sampled profiles

  double at(int r) const { return nu.at(r); }
  /// Largest r with nu[r] < 1/2 (0 if none).
  int r_max() const;
};

/// Per-block values psi(V_t M_t z) for a direction z.
Vector block_values(const OutputMaps& maps, const Loss& psi, VectorRef z);

/// Exact profile for polyhedral psi (l1, or any p = 1 norm when ny = 1) and
/// the l0 losses: the supremum is attained on directions orthogonal to n-1
/// independent rows of the stacked weighted maps. Throws
/// UnsupportedOperation for other kinds or more than 1e6 row subsets.
NuProfile nu_exact(const OutputMaps& maps, const Loss& psi);

/// Sampled profile over the unit sphere (n <= 3): `grid` angles on [0, pi)
/// for n = 2, a `grid`-point Fibonacci hemisphere for n = 3, z = 1 for n = 1.
/// A lower estimate of the supremum.
NuProfile nu_brute(const OutputMaps& maps, const Loss& psi, int grid = 100000);

/// The value for a single r.
double nu_brute(const OutputMaps& maps, const Loss& psi, int r, int grid);

struct Nu0Result {
  double value = 0.0;
  int argmax = 0;
  std::vector<double> per_block;  // optimal ||lambda_t||_inf for each t
};

/// max_t min ||lambda||_inf s.t. V_t M_t = sum_{k != t} lambda_k V_k M_k.
/// Throws PreconditionViolation naming t when a block is outside the span
/// of the others.
Nu0Result nu0(const OutputMaps& maps);

/// r nu0 / (1 + nu0).
double nu_upper(double nu0, int r);

struct RMax {
  int value = 0;
  bool unbounded = false;  // nu0 = 0
};

/// Largest r with r nu0 / (1 + nu0) < 1/2.
RMax r_max_from_nu0(double nu0);

struct MuResult {
  int value = 0;
  bool exhaustive = true;
};

/// Smallest k such that every k-subset of blocks (rows when `entrywise`)
/// of the weighted maps has rank n. Computed as 1 + the largest number of
/// blocks annihilated by a nonzero direction. Throws for a non-observable
/// collection.
MuResult mu(const OutputMaps& maps, bool entrywise);

/// Direct subset search, descending from the full set. Capped at `cap`
/// rank evaluations; `exhaustive` is false if the cap was hit.
MuResult mu_subsets(const OutputMaps& maps, bool entrywise, long cap = 1000000);

/// Largest count strictly below (T - mu + 1) / 2.
int l0_tolerance(int T, int mu);
/// Entrywise version: largest count strictly below (ny T - mu + 1) / 2.
int l0_tolerance_entry(int ny, int T, int mu_entry);
/// ceil(ny / 2 - 1).
int sensor_tolerance(int ny);

struct D1Result {
  double value = 0.0;
  Vector argmin;
  bool degenerate = false;  // value ~ 0: collection not observable
  int grid = 0;
};

/// min over the unit sphere of sum_t psi(V_t M_t z) (n <= 3), on the grid
/// plus, for polyhedral psi, every vertex direction.
D1Result D1(const OutputMaps& maps, const Loss& psi, int grid = 100000);

enum class PartitionMode { Block, Entry };

/// Optional constants D and p_r for delta and b(eps).
struct BoundConstants {
  double D = 1.0;
  double p_r = 0.0;
};

struct EpsilonPartition {
  double eps = 0.0;
  PartitionMode mode = PartitionMode::Block;
  std::vector<int> T_eps;                       // block mode
  std::vector<int> T_eps_c;
  std::vector<std::pair<int, int>> Lambda_eps;  // entry mode: (t, i)
  std::vector<std::pair<int, int>> Lambda_eps_c;
  int r = 0;               // |T_eps^c| or |Lambda_eps^c|
  double process = 0.0;    // lambda sum_t phi_t(w_t)
  double inlier = 0.0;     // sum over T_eps (or Lambda_eps) of psi
  double outlier = 0.0;    // sum over the complement
  double r_o = 0.0;        // max psi over the complement (0 if empty)
  double beta = 0.0;
  double delta = 0.0;      // NaN without constants unless gamma_psi = 1
  double b = 0.0;          // NaN without constants
};

/// T_eps = {t : psi_t(f_t) <= eps}; in entry mode the per-entry values are
/// psi_t(f_ti e_i). `W` holds the process noise columns (may be empty).
EpsilonPartition partition(const Matrix& F, const LossFamily& psi, double eps, PartitionMode mode,
                           const Matrix& W, const LossFamily& phi, double lambda,
                           std::optional<BoundConstants> constants = std::nullopt);

struct PrSampleOptions {
  int directions = 2000;   // random free-trajectory directions
  int random_trajectories = 200;
  int ascent_steps = 200;
  std::uint64_t seed = 1;
};

/// Sampled lower estimate of the r-resilience index
/// sup_Z top_r(psi_t(C_t z_t)) / H(Z), H = lambda g_phi Phi(Z) + g_psi Psi(Z).
/// Entry mode ranks the individual entries instead of the blocks.
/// Returns the profile r = 0..T (or 0..ny T).
std::vector<double> p_r_sample(const LtvSystem& sys, const LossFamily& phi, const LossFamily& psi,
                               double lambda, PartitionMode mode, const PrSampleOptions& opts = {});

/// Unit-sphere sample points used by the sampled certificates.
std::vector<Vector> sphere_grid(int n, int grid);

}  // namespace resest
