#include "resest/ltv.hpp"

#include <cmath>
#include <limits>

#include "resest/error.hpp"

namespace resest {

LtvSystem::LtvSystem(std::vector<Matrix> A, std::vector<Matrix> C)
    : A_(std::move(A)), C_(std::move(C)) {
  if (C_.empty()) throw InvalidArgument("LTV system: horizon must be at least 1");
  if (A_.size() + 1 != C_.size()) {
    throw InvalidArgument("LTV system: expected " + std::to_string(C_.size() - 1) +
                          " dynamics matrices for horizon " + std::to_string(C_.size()) +
                          ", got " + std::to_string(A_.size()));
  }
  n_ = static_cast<int>(C_.front().cols());
  ny_ = static_cast<int>(C_.front().rows());
  if (n_ <= 0 || ny_ <= 0) throw InvalidArgument("LTV system: empty output matrix");
  for (std::size_t t = 0; t < C_.size(); ++t) {
    if (C_[t].rows() != ny_ || C_[t].cols() != n_) {
      throw InvalidArgument("LTV system: C_" + std::to_string(t) + " is not " +
                            std::to_string(ny_) + "x" + std::to_string(n_));
    }
  }
  for (std::size_t t = 0; t < A_.size(); ++t) {
    if (A_[t].rows() != n_ || A_[t].cols() != n_) {
      throw InvalidArgument("LTV system: A_" + std::to_string(t) + " is not " +
                            std::to_string(n_) + "x" + std::to_string(n_));
    }
  }
}

LtvSystem LtvSystem::lti(const Matrix& A, const Matrix& C, int horizon) {
  if (horizon < 1) throw InvalidArgument("LTI system: horizon must be at least 1");
  LtvSystem sys(std::vector<Matrix>(horizon - 1, A), std::vector<Matrix>(horizon, C));
  sys.lti_ = true;
  return sys;
}

Matrix LtvSystem::transition(int t) const {
  Matrix P = Matrix::Identity(n_, n_);
  for (int k = 0; k < t; ++k) P = A_.at(k) * P;
  return P;
}

LtvSystem LtvSystem::truncated(int horizon) const {
  if (horizon < 1 || horizon > this->horizon()) {
    throw InvalidArgument("truncated: horizon out of range");
  }
  LtvSystem sys(std::vector<Matrix>(A_.begin(), A_.begin() + (horizon - 1)),
                std::vector<Matrix>(C_.begin(), C_.begin() + horizon));
  sys.lti_ = lti_;
  return sys;
}

NoiseRealization NoiseRealization::zero(const LtvSystem& sys) {
  const int T = sys.horizon();
  return {Matrix::Zero(sys.n(), T - 1), Matrix::Zero(sys.ny(), T), Matrix::Zero(sys.ny(), T), 0};
}

Matrix OutputMaps::stacked() const {
  const int T = horizon(), p = ny();
  Matrix R(static_cast<Eigen::Index>(T) * p, n());
  for (int t = 0; t < T; ++t) R.middleRows(static_cast<Eigen::Index>(t) * p, p) = weighted(t);
  return R;
}

Simulation simulate(const LtvSystem& sys, VectorRef x0, const NoiseRealization& noise) {
  const int n = sys.n(), ny = sys.ny(), T = sys.horizon();
  if (x0.size() != n) throw InvalidArgument("simulate: x0 has the wrong dimension");
  if (noise.W.rows() != n || noise.W.cols() != T - 1) {
    throw InvalidArgument("simulate: process noise must be n x (T-1)");
  }
  if (noise.Vd.rows() != ny || noise.Vd.cols() != T || noise.S.rows() != ny ||
      noise.S.cols() != T) {
    throw InvalidArgument("simulate: output noise must be ny x T");
  }
  Simulation out{Trajectory(n, T), Matrix(ny, T)};
  out.X.col(0) = x0;
  for (int t = 0; t + 1 < T; ++t) out.X.col(t + 1) = sys.A(t) * out.X.col(t) + noise.W.col(t);
  for (int t = 0; t < T; ++t) {
    out.Y.col(t) = sys.C(t) * out.X.col(t) + noise.Vd.col(t) + noise.S.col(t);
  }
  return out;
}

Matrix observability_matrix(const LtvSystem& sys) {
  const int ny = sys.ny(), T = sys.horizon();
  Matrix O(static_cast<Eigen::Index>(ny) * T, sys.n());
  Matrix P = Matrix::Identity(sys.n(), sys.n());
  for (int t = 0; t < T; ++t) {
    O.middleRows(static_cast<Eigen::Index>(t) * ny, ny) = sys.C(t) * P;
    if (t + 1 < T) P = sys.A(t) * P;
  }
  return O;
}

int numerical_rank(const Matrix& M) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  const double tol =
      static_cast<double>(M.cols()) * std::numeric_limits<double>::epsilon() * s[0];
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) rank += s[i] > tol ? 1 : 0;
  return rank;
}

bool is_observable(const LtvSystem& sys) {
  return numerical_rank(observability_matrix(sys)) == sys.n();
}

OutputMaps output_maps(const LtvSystem& sys, bool normalize) {
  const int T = sys.horizon(), ny = sys.ny();
  OutputMaps maps;
  maps.M.reserve(T);
  maps.weights.reserve(T);
  Matrix P = Matrix::Identity(sys.n(), sys.n());
  for (int t = 0; t < T; ++t) {
    maps.M.push_back(sys.C(t) * P);
    if (t + 1 < T) P = sys.A(t) * P;
    Vector w = Vector::Ones(ny);
    if (normalize) {
      for (int i = 0; i < ny; ++i) {
        const double r = maps.M.back().row(i).norm();
        if (r > 0.0) w[i] = 1.0 / r;
      }
    }
    maps.weights.push_back(std::move(w));
  }
  return maps;
}

Matrix gen_sparse_noise(Rng& rng, int horizon, int ny, double fraction, double sigma,
                        SparsityMode mode) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw InvalidArgument("gen_sparse_noise: fraction must lie in [0, 1]");
  }
  if (horizon < 1 || ny < 1) throw InvalidArgument("gen_sparse_noise: empty shape");
  if (!(sigma >= 0.0)) throw InvalidArgument("gen_sparse_noise: sigma must be nonnegative");
  const int slots = mode == SparsityMode::Block ? horizon : horizon * ny;
  const int count = static_cast<int>(std::lround(fraction * slots));
  Matrix S = Matrix::Zero(ny, horizon);
  // Interleaved partial Fisher-Yates: position then its value(s).
  std::vector<int> pool(slots);
  for (int i = 0; i < slots; ++i) pool[i] = i;
  for (int k = 0; k < count; ++k) {
    const int j = k + static_cast<int>(rng.below(static_cast<std::uint64_t>(slots - k)));
    std::swap(pool[k], pool[j]);
    const int pos = pool[k];
    if (mode == SparsityMode::Block) {
      for (int i = 0; i < ny; ++i) {
        double value = 0.0;
        while (value == 0.0) value = sigma * rng.normal();
        S(i, pos) = value;
      }
    } else {
      double value = 0.0;
      while (value == 0.0) value = sigma * rng.normal();
      S(pos % ny, pos / ny) = value;
    }
  }
  return S;
}

Matrix gen_dense_noise(Rng& rng, double amplitude, int rows, int cols) {
  if (!(amplitude >= 0.0)) throw InvalidArgument("gen_dense_noise: amplitude must be >= 0");
  Matrix N(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) N(i, j) = amplitude * (2.0 * rng.uniform() - 1.0);
  }
  return N;
}

double snr_to_amplitude(double signal_power, double snr_db) {
  if (!(signal_power >= 0.0)) throw InvalidArgument("snr_to_amplitude: negative power");
  return std::sqrt(3.0 * signal_power / std::pow(10.0, snr_db / 10.0));
}

double mean_power(const Matrix& X) {
  return X.size() == 0 ? 0.0 : X.squaredNorm() / static_cast<double>(X.size());
}

Matrix propagated_state_noise(const LtvSystem& sys, const Matrix& W) {
  const int T = sys.horizon();
  if (W.rows() != sys.n() || W.cols() != T - 1) {
    throw InvalidArgument("propagated_state_noise: W must be n x (T-1)");
  }
  Matrix out = Matrix::Zero(sys.n(), T);
  for (int t = 1; t < T; ++t) out.col(t) = sys.A(t - 1) * out.col(t - 1) + W.col(t - 1);
  return out;
}

Matrix propagated_output_noise(const LtvSystem& sys, const Matrix& W) {
  const Matrix wt = propagated_state_noise(sys, W);
  Matrix out(sys.ny(), sys.horizon());
  for (int t = 0; t < sys.horizon(); ++t) out.col(t) = sys.C(t) * wt.col(t);
  return out;
}

Trajectory free_trajectory(const LtvSystem& sys, VectorRef x0) {
  if (x0.size() != sys.n()) throw InvalidArgument("free_trajectory: x0 has the wrong dimension");
  Trajectory X(sys.n(), sys.horizon());
  X.col(0) = x0;
  for (int t = 0; t + 1 < sys.horizon(); ++t) X.col(t + 1) = sys.A(t) * X.col(t);
  return X;
}

}  // namespace resest
