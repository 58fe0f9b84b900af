#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "resest/losses.hpp"
#include "resest/rng.hpp"

namespace resest {

/// n x T state trajectory, column t is x_t.
using Trajectory = Eigen::MatrixXd;

/// x_{t+1} = A_t x_t + w_t,  y_t = C_t x_t + f_t  on t = 0, ..., T-1.
class LtvSystem {
 public:
  /// `A` has T-1 entries (n x n), `C` has T entries (ny x n).
  LtvSystem(std::vector<Matrix> A, std::vector<Matrix> C);

  /// Replicates a single (A, C) pair across the horizon.
  static LtvSystem lti(const Matrix& A, const Matrix& C, int horizon);

  int n() const { return n_; }
  int ny() const { return ny_; }
  int horizon() const { return static_cast<int>(C_.size()); }
  bool is_lti() const { return lti_; }

  const Matrix& A(int t) const { return A_.at(t); }
  const Matrix& C(int t) const { return C_.at(t); }
  const std::vector<Matrix>& A_seq() const { return A_; }
  const std::vector<Matrix>& C_seq() const { return C_; }

  /// A_{t-1} ... A_0, identity for t = 0.
  Matrix transition(int t) const;

  /// A copy restricted to the first `horizon` time steps.
  LtvSystem truncated(int horizon) const;

 private:
  std::vector<Matrix> A_;
  std::vector<Matrix> C_;
  int n_ = 0;
  int ny_ = 0;
  bool lti_ = false;
};

/// Process noise w (n x (T-1)), dense output noise v (ny x T) and sparse
/// attack s (ny x T). f = v + s.
struct NoiseRealization {
  Matrix W;
  Matrix Vd;
  Matrix S;
  std::uint64_t seed = 0;

  static NoiseRealization zero(const LtvSystem& sys);
  Matrix total_output_noise() const { return Vd + S; }
};

enum class SparsityMode { Block, Entry };

/// Output maps M_t = C_t A_{t-1} ... A_0 and diagonal weights V_t.
struct OutputMaps {
  std::vector<Matrix> M;
  std::vector<Vector> weights;

  int horizon() const { return static_cast<int>(M.size()); }
  int n() const { return M.empty() ? 0 : static_cast<int>(M.front().cols()); }
  int ny() const { return M.empty() ? 0 : static_cast<int>(M.front().rows()); }
  /// V_t M_t.
  Matrix weighted(int t) const { return weights.at(t).asDiagonal() * M.at(t); }
  /// All weighted maps stacked: (ny T) x n, block t in rows [t ny, (t+1) ny).
  Matrix stacked() const;
};

struct Simulation {
  Trajectory X;
  Matrix Y;
};

Simulation simulate(const LtvSystem& sys, VectorRef x0, const NoiseRealization& noise);

/// Stacks C_0, C_1 A_0, ..., C_{T-1} A_{T-2} ... A_0.
Matrix observability_matrix(const LtvSystem& sys);

/// Numerical rank with the threshold n * eps * sigma_max.
int numerical_rank(const Matrix& M);
bool is_observable(const LtvSystem& sys);

/// With `normalize`, V_ti = 1 / ||row i of M_t||_2 (1 for a zero row),
/// otherwise V_t = I.
OutputMaps output_maps(const LtvSystem& sys, bool normalize);

/// r = round(fraction * count) support positions chosen uniformly without
/// replacement (columns in block mode, entries in entry mode); nonzero
/// values i.i.d. N(0, sigma^2). Each position is drawn together with its
/// value, so for a fixed generator state the support for r is a prefix of
/// the support for any larger r.
Matrix gen_sparse_noise(Rng& rng, int horizon, int ny, double fraction, double sigma,
                        SparsityMode mode);

/// i.i.d. Uniform(-a, a) entries.
Matrix gen_dense_noise(Rng& rng, double amplitude, int rows, int cols);

/// Amplitude a of uniform noise whose power a^2 / 3 sits `snr_db` below
/// `signal_power`.
double snr_to_amplitude(double signal_power, double snr_db);

/// Mean squared entry of a matrix (0 for an empty matrix).
double mean_power(const Matrix& X);

/// Output contribution of the process noise propagated through the
/// dynamics: vtilde_t = sum_{k<t} C_t A_{t-1} ... A_{k+1} w_k (ny x T).
Matrix propagated_output_noise(const LtvSystem& sys, const Matrix& W);

/// State contribution wtilde_t = sum_{k<t} A_{t-1} ... A_{k+1} w_k (n x T).
Matrix propagated_state_noise(const LtvSystem& sys, const Matrix& W);

/// Noise-free trajectory (x0, A_0 x0, ..., A_{T-2} ... A_0 x0).
Trajectory free_trajectory(const LtvSystem& sys, VectorRef x0);

}  // namespace resest
