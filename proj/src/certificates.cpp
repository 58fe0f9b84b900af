#include "resest/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "resest/error.hpp"
#include "resest/lp.hpp"

namespace resest {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Sorted-descending prefix shares of `values`; folds into `nu` by max.
bool fold_profile(Vector values, std::vector<double>& nu) {
  const double total = values.sum();
  if (!(total > 0.0)) return false;
  std::sort(values.data(), values.data() + values.size(), std::greater<double>());
  double run = 0.0;
  const int R = static_cast<int>(std::min<Eigen::Index>(values.size(), nu.size() - 1));
  for (int r = 1; r <= R; ++r) {
    run += values[r - 1];
    nu[r] = std::max(nu[r], std::min(run / total, 1.0));
  }
  for (std::size_t r = R + 1; r < nu.size(); ++r) nu[r] = std::max(nu[r], 1.0);
  return true;
}

bool exact_supported(const Loss& psi) {
  if (psi.is_l0()) return true;
  const auto* np = std::get_if<NormPower>(&psi.kind());
  return np && np->p == 1.0 && (np->norm == Norm::L1 || psi.dim() == 1);
}

long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r > 9e18 ? std::numeric_limits<long>::max() : static_cast<long>(std::llround(r));
}

/// Calls `visit` on a unit normal of every (n-1)-subset of rows with rank n-1.
/// For n = 1 the single direction z = 1.
long for_each_vertex_direction(const Matrix& R, const std::function<void(const Vector&)>& visit,
                               long cap) {
  const int n = static_cast<int>(R.cols());
  const int m = static_cast<int>(R.rows());
  if (n == 1) {
    visit(Vector::Ones(1));
    return 1;
  }
  const int k = n - 1;
  if (binomial(m, k) > cap) {
    throw UnsupportedOperation("vertex enumeration needs more than " + std::to_string(cap) +
                               " row subsets");
  }
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  Matrix S(k, n);
  long count = 0;
  while (m >= k) {
    for (int i = 0; i < k; ++i) S.row(i) = R.row(idx[i]);
    if (n == 2) {
      Vector z(2);
      z << -S(0, 1), S(0, 0);
      const double nz = z.norm();
      if (nz > 0.0) {
        visit(z / nz);
        ++count;
      }
    } else if (n == 3) {
      const Eigen::Vector3d a = S.row(0).transpose(), b = S.row(1).transpose();
      const Eigen::Vector3d c = a.cross(b);
      const double nc = c.norm();
      if (nc > 1e-12 * a.norm() * b.norm()) {
        visit(Vector(c / nc));
        ++count;
      }
    } else {
      Eigen::FullPivLU<Matrix> lu(S);
      if (lu.rank() == k) {
        const Matrix K = lu.kernel();
        visit(K.col(0).normalized());
        ++count;
      }
    }
    int j = k - 1;
    while (j >= 0 && idx[j] == m - k + j) --j;
    if (j < 0) break;
    ++idx[j];
    for (int i = j + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
  return count;
}

double top_share(Vector values, int r) {
  const double total = values.sum();
  if (!(total > 0.0)) return 0.0;
  r = std::min<int>(r, static_cast<int>(values.size()));
  std::partial_sort(values.data(), values.data() + r, values.data() + values.size(),
                    std::greater<double>());
  return values.head(r).sum() / total;
}

}  // namespace

int NuProfile::r_max() const {
  int r = 0;
  while (r + 1 < static_cast<int>(nu.size()) && nu[r + 1] < 0.5) ++r;
  return r;
}

std::vector<Vector> sphere_grid(int n, int grid) {
  if (grid < 1) throw InvalidArgument("sphere_grid: grid must be positive");
  std::vector<Vector> pts;
  if (n == 1) {
    pts.push_back(Vector::Ones(1));
  } else if (n == 2) {
    pts.reserve(grid);
    for (int k = 0; k < grid; ++k) {
      const double th = kPi * k / grid;
      Vector z(2);
      z << std::cos(th), std::sin(th);
      pts.push_back(z);
    }
  } else if (n == 3) {
    // psi is even, so a hemisphere suffices.
    pts.reserve(grid);
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < grid; ++k) {
      const double h = (k + 0.5) / grid;
      const double rad = std::sqrt(std::max(0.0, 1.0 - h * h));
      Vector z(3);
      z << rad * std::cos(golden * k), rad * std::sin(golden * k), h;
      pts.push_back(z);
    }
  } else {
    throw InvalidArgument("sphere grids are limited to n <= 3");
  }
  return pts;
}

Vector block_values(const OutputMaps& maps, const Loss& psi, VectorRef z) {
  const int T = maps.horizon();
  Vector v(T);
  for (int t = 0; t < T; ++t) {
    v[t] = eval(psi, maps.weights[t].cwiseProduct(maps.M[t] * z));
  }
  return v;
}

NuProfile nu_exact(const OutputMaps& maps, const Loss& psi) {
  if (psi.dim() != maps.ny()) throw InvalidArgument("nu_exact: psi dimension mismatch");
  if (!exact_supported(psi)) {
    throw UnsupportedOperation("nu_exact: loss '" + psi.tag() + "' has no exact vertex method");
  }
  NuProfile prof;
  prof.exact = true;
  prof.nu.assign(maps.horizon() + 1, 0.0);
  double best_last = -1.0;
  const Matrix R = maps.stacked();
  prof.directions = for_each_vertex_direction(
      R,
      [&](const Vector& z) {
        if (fold_profile(block_values(maps, psi, z), prof.nu) && prof.nu.back() > best_last) {
          best_last = prof.nu.back();
          prof.argmax = z;
        }
      },
      1000000);
  return prof;
}

NuProfile nu_brute(const OutputMaps& maps, const Loss& psi, int grid) {
  if (psi.dim() != maps.ny()) throw InvalidArgument("nu_brute: psi dimension mismatch");
  const int n = maps.n();
  if (n > 3) throw InvalidArgument("nu_brute: limited to n <= 3");
  NuProfile prof;
  prof.grid = grid;
  prof.nu.assign(maps.horizon() + 1, 0.0);
  const int mid = std::max(1, maps.horizon() / 2);
  double best = -1.0;
  for (const Vector& z : sphere_grid(n, grid)) {
    const Vector v = block_values(maps, psi, z);
    if (fold_profile(v, prof.nu)) {
      ++prof.directions;
      const double s = top_share(v, mid);
      if (s > best) {
        best = s;
        prof.argmax = z;
      }
    }
  }
  return prof;
}

double nu_brute(const OutputMaps& maps, const Loss& psi, int r, int grid) {
  if (r < 0 || r > maps.horizon()) throw InvalidArgument("nu_brute: r out of range");
  if (r == 0) return 0.0;
  return nu_brute(maps, psi, grid).nu[r];
}

Nu0Result nu0(const OutputMaps& maps) {
  const int T = maps.horizon();
  const int ny = maps.ny(), n = maps.n();
  Matrix basis(T, ny * n);
  for (int t = 0; t < T; ++t) {
    const Matrix B = maps.weighted(t);
    basis.row(t) = Eigen::Map<const Vector>(B.data(), B.size()).transpose();
  }
  Nu0Result res;
  res.per_block.resize(T);
  for (int t = 0; t < T; ++t) {
    try {
      res.per_block[t] = linf_min(basis.row(t).transpose(), basis, t).value;
    } catch (const Infeasible&) {
      throw PreconditionViolation("nu0: block " + std::to_string(t) +
                                  " is outside the span of the other blocks (mu(M) > T-1)");
    }
    if (t == 0 || res.per_block[t] > res.value) {
      res.value = res.per_block[t];
      res.argmax = t;
    }
  }
  return res;
}

double nu_upper(double nu0_value, int r) { return r * nu0_value / (1.0 + nu0_value); }

RMax r_max_from_nu0(double nu0_value) {
  RMax out;
  if (!(nu0_value > 0.0)) {
    out.unbounded = true;
    out.value = std::numeric_limits<int>::max();
    return out;
  }
  long r = static_cast<long>(std::ceil((1.0 + 1.0 / nu0_value) / 2.0)) - 1;
  r = std::max(r, 0L);
  while (nu_upper(nu0_value, static_cast<int>(r) + 1) < 0.5) ++r;
  while (r > 0 && nu_upper(nu0_value, static_cast<int>(r)) >= 0.5) --r;
  out.value = static_cast<int>(r);
  return out;
}

MuResult mu(const OutputMaps& maps, bool entrywise) {
  const Matrix R = maps.stacked();
  const int n = maps.n(), ny = maps.ny();
  if (numerical_rank(R) < n) throw PreconditionViolation("mu: the output maps are not observable");
  const int block = entrywise ? 1 : ny;
  const int blocks = static_cast<int>(R.rows()) / block;
  Vector row_norm = R.rowwise().norm();
  int worst = 0;
  for_each_vertex_direction(
      R,
      [&](const Vector& z) {
        int count = 0;
        for (int b = 0; b < blocks; ++b) {
          bool zero = true;
          for (int i = b * block; i < (b + 1) * block && zero; ++i) {
            zero = std::abs(R.row(i).dot(z)) <= 1e-9 * row_norm[i];
          }
          count += zero ? 1 : 0;
        }
        worst = std::max(worst, count);
      },
      1000000);
  if (worst >= blocks) throw PreconditionViolation("mu: the output maps are not observable");
  return {worst + 1, true};
}

MuResult mu_subsets(const OutputMaps& maps, bool entrywise, long cap) {
  const Matrix R = maps.stacked();
  const int n = maps.n(), ny = maps.ny();
  if (numerical_rank(R) < n) throw PreconditionViolation("mu: the output maps are not observable");
  const int block = entrywise ? 1 : ny;
  const int blocks = static_cast<int>(R.rows()) / block;
  long evaluations = 0;
  for (int k = 1; k <= blocks; ++k) {
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    bool all_full = true;
    while (true) {
      Matrix S(k * block, n);
      for (int i = 0; i < k; ++i) S.middleRows(i * block, block) = R.middleRows(idx[i] * block, block);
      if (numerical_rank(S) < n) {
        all_full = false;
        break;
      }
      if (++evaluations > cap) return {k, false};
      int j = k - 1;
      while (j >= 0 && idx[j] == blocks - k + j) --j;
      if (j < 0) break;
      ++idx[j];
      for (int i = j + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
    if (all_full) return {k, true};
  }
  throw PreconditionViolation("mu: the output maps are not observable");
}

int l0_tolerance(int T, int mu_value) {
  if (mu_value > T || mu_value < 1) throw InvalidArgument("l0_tolerance: need 1 <= mu <= T");
  return (T - mu_value) / 2;
}

int l0_tolerance_entry(int ny, int T, int mu_entry) { return l0_tolerance(ny * T, mu_entry); }

int sensor_tolerance(int ny) {
  if (ny < 1) throw InvalidArgument("sensor_tolerance: ny must be positive");
  return (ny - 1) / 2;
}

D1Result D1(const OutputMaps& maps, const Loss& psi, int grid) {
  if (psi.dim() != maps.ny()) throw InvalidArgument("D1: psi dimension mismatch");
  const int n = maps.n();
  if (n > 3) throw InvalidArgument("D1: limited to n <= 3");
  D1Result res;
  res.grid = grid;
  res.value = std::numeric_limits<double>::infinity();
  auto consider = [&](const Vector& z) {
    const double v = block_values(maps, psi, z).sum();
    if (v < res.value) {
      res.value = v;
      res.argmin = z;
    }
  };
  for (const Vector& z : sphere_grid(n, grid)) consider(z);
  if (exact_supported(psi) && !psi.is_l0()) {
    for_each_vertex_direction(maps.stacked(), consider, 1000000);
  }
  double scale = 0.0;
  for (int t = 0; t < maps.horizon(); ++t) scale += maps.weighted(t).norm();
  res.degenerate = !(res.value > 1e-12 * std::max(scale, 1e-300));
  return res;
}

EpsilonPartition partition(const Matrix& F, const LossFamily& psi, double eps, PartitionMode mode,
                           const Matrix& W, const LossFamily& phi, double lambda,
                           std::optional<BoundConstants> constants) {
  if (!(eps >= 0.0)) throw InvalidArgument("partition: eps must be nonnegative");
  const int ny = static_cast<int>(F.rows()), T = static_cast<int>(F.cols());
  if (psi.dim() != ny || psi.size() < T) throw InvalidArgument("partition: psi does not match F");
  EpsilonPartition p;
  p.eps = eps;
  p.mode = mode;
  for (int t = 0; t < W.cols(); ++t) p.process += phi.eval(t, W.col(t));
  p.process *= lambda;
  auto classify = [&](double v, auto&& in, auto&& out) {
    if (v <= eps) {
      p.inlier += v;
      in();
    } else {
      p.outlier += v;
      p.r_o = std::max(p.r_o, v);
      ++p.r;
      out();
    }
  };
  for (int t = 0; t < T; ++t) {
    if (mode == PartitionMode::Block) {
      classify(psi.eval(t, F.col(t)), [&] { p.T_eps.push_back(t); }, [&] { p.T_eps_c.push_back(t); });
    } else {
      for (int i = 0; i < ny; ++i) {
        Vector e = Vector::Zero(ny);
        e[i] = F(i, t);
        classify(psi.eval(t, e), [&] { p.Lambda_eps.emplace_back(t, i); },
                 [&] { p.Lambda_eps_c.emplace_back(t, i); });
      }
    }
  }
  p.beta = p.process + p.inlier;
  const double gamma = gti_constant(psi.base());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const bool no_delta = (1.0 - gamma) == 0.0 || p.outlier == 0.0;
  p.delta = no_delta ? 0.0 : nan;
  p.b = nan;
  if (constants) {
    const double denom = constants->D * (1.0 - (1.0 + gamma) * constants->p_r);
    const double inf = std::numeric_limits<double>::infinity();
    if (!no_delta) p.delta = denom > 0.0 ? (1.0 - gamma) * p.outlier / denom : inf;
    const double num = 2.0 * p.beta + p.r * (1.0 - gamma) * p.r_o;
    p.b = num == 0.0 ? 0.0 : (denom > 0.0 ? num / denom : inf);
  }
  return p;
}

std::vector<double> p_r_sample(const LtvSystem& sys, const LossFamily& phi, const LossFamily& psi,
                               double lambda, PartitionMode mode, const PrSampleOptions& opts) {
  const int n = sys.n(), ny = sys.ny(), T = sys.horizon();
  if (phi.dim() != n || psi.dim() != ny || phi.size() < T - 1 || psi.size() < T) {
    throw InvalidArgument("p_r_sample: loss families do not match the system");
  }
  if (!(lambda > 0.0)) throw InvalidArgument("p_r_sample: lambda must be positive");
  const double g_phi = gti_constant(phi.base());
  const double g_psi = gti_constant(psi.base());
  const int slots = mode == PartitionMode::Block ? T : T * ny;
  std::vector<double> prof(slots + 1, 0.0);

  // Ranked values and the coercive cost H(Z).
  auto values = [&](const Matrix& Z, double* H) {
    Vector v(slots);
    double process = 0.0, output = 0.0;
    for (int t = 0; t + 1 < T; ++t) process += phi.eval(t, Z.col(t + 1) - sys.A(t) * Z.col(t));
    for (int t = 0; t < T; ++t) {
      const Vector e = sys.C(t) * Z.col(t);
      const double whole = psi.eval(t, e);
      output += whole;
      if (mode == PartitionMode::Block) {
        v[t] = whole;
      } else {
        for (int i = 0; i < ny; ++i) {
          Vector ei = Vector::Zero(ny);
          ei[i] = e[i];
          v[t * ny + i] = psi.eval(t, ei);
        }
      }
    }
    *H = lambda * g_phi * process + g_psi * output;
    return v;
  };
  auto ratio = [&](const Matrix& Z, int r) {
    double H = 0.0;
    Vector v = values(Z, &H);
    if (!(H > 0.0)) return 0.0;
    std::partial_sort(v.data(), v.data() + r, v.data() + v.size(), std::greater<double>());
    return v.head(r).sum() / H;
  };
  auto fold = [&](const Matrix& Z) {
    double H = 0.0;
    Vector v = values(Z, &H);
    if (!(H > 0.0)) return;
    std::sort(v.data(), v.data() + v.size(), std::greater<double>());
    double run = 0.0;
    for (int r = 1; r <= slots; ++r) {
      run += v[r - 1];
      prof[r] = std::max(prof[r], run / H);
    }
  };

  Rng rng(opts.seed);
  auto random_unit = [&] {
    Vector z(n);
    for (int i = 0; i < n; ++i) z[i] = rng.normal();
    const double nz = z.norm();
    return nz > 0.0 ? Vector(z / nz) : Vector(Vector::Unit(n, 0));
  };
  // Free trajectories: Phi = 0.
  std::vector<Vector> dirs;
  for (int k = 0; k < opts.directions; ++k) {
    dirs.push_back(random_unit());
    fold(free_trajectory(sys, dirs.back()));
  }
  // Local ascent over the initial state for each r.
  for (int r = 1; r <= slots; ++r) {
    Vector best_z = dirs.empty() ? random_unit() : dirs.front();
    double best = ratio(free_trajectory(sys, best_z), r);
    for (std::size_t k = 1; k < dirs.size(); k += std::max<std::size_t>(1, dirs.size() / 64)) {
      const double v = ratio(free_trajectory(sys, dirs[k]), r);
      if (v > best) {
        best = v;
        best_z = dirs[k];
      }
    }
    double step = 0.5;
    for (int s = 0; s < opts.ascent_steps && step > 1e-10; ++s) {
      Vector cand = best_z;
      for (int i = 0; i < n; ++i) cand[i] += step * rng.normal();
      cand.normalize();
      const double v = ratio(free_trajectory(sys, cand), r);
      if (v > best) {
        best = v;
        best_z = cand;
      } else {
        step *= 0.9;
      }
    }
    prof[r] = std::max(prof[r], best);
  }
  // Generic trajectories, near-free and fully random.
  for (int k = 0; k < opts.random_trajectories; ++k) {
    Matrix Z(n, T);
    if (k % 2 == 0 && !dirs.empty()) {
      Z = free_trajectory(sys, dirs[rng.below(dirs.size())]);
      const double sigma = std::pow(10.0, -1.0 - 3.0 * rng.uniform());
      for (Eigen::Index i = 0; i < Z.size(); ++i) Z.data()[i] += sigma * rng.normal();
    } else {
      for (Eigen::Index i = 0; i < Z.size(); ++i) Z.data()[i] = rng.normal();
    }
    fold(Z);
  }
  return prof;
}

}  // namespace resest
