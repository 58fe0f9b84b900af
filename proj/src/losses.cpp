#include "resest/losses.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "resest/error.hpp"

namespace resest {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double norm_of(Norm norm, VectorRef z) {
  switch (norm) {
    case Norm::L1:
      return z.lpNorm<1>();
    case Norm::L2:
      return z.norm();
    case Norm::Linf:
      return z.size() == 0 ? 0.0 : z.lpNorm<Eigen::Infinity>();
  }
  return 0.0;
}

Vector soft_threshold(VectorRef v, double t) {
  Vector u(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]) - t;
    u[i] = a > 0.0 ? std::copysign(a, v[i]) : 0.0;
  }
  return u;
}

// Euclidean projection onto {x : ||x||_1 <= radius} (sort-based).
Vector project_l1_ball(VectorRef v, double radius) {
  if (v.lpNorm<1>() <= radius) return v;
  std::vector<double> a(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) a[i] = std::abs(v[i]);
  std::sort(a.begin(), a.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    cumsum += a[k];
    const double candidate = (cumsum - radius) / static_cast<double>(k + 1);
    if (k + 1 == a.size() || a[k + 1] <= candidate) {
      theta = candidate;
      break;
    }
  }
  return soft_threshold(v, theta);
}

Vector prox_norm(Norm norm, VectorRef v, double t) {
  switch (norm) {
    case Norm::L1:
      return soft_threshold(v, t);
    case Norm::L2: {
      const double nv = v.norm();
      if (nv <= t) return Vector::Zero(v.size());
      return (1.0 - t / nv) * v;
    }
    case Norm::Linf:
      return v - project_l1_ball(v, t);
  }
  return v;
}

// prox of step * ||u||^p for p > 1: the minimizer is a norm prox with the
// effective weight step * p * s^(p-1), where s = ||u|| solves a monotone
// scalar fixed-point equation.
Vector prox_norm_power(Norm norm, double p, VectorRef v, double step) {
  const double upper = norm_of(norm, v);
  if (upper == 0.0) return Vector::Zero(v.size());
  auto residual = [&](double s) {
    const double mu = step * p * std::pow(s, p - 1.0);
    return s - norm_of(norm, prox_norm(norm, v, mu));
  };
  double lo = 0.0, hi = upper;
  for (int it = 0; it < 200 && hi - lo > 1e-300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double s = 0.5 * (lo + hi);
  return prox_norm(norm, v, step * p * std::pow(s, p - 1.0));
}

std::string format_number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

double parse_number(std::string_view text, std::string_view tag) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw InvalidArgument("loss tag '" + std::string(tag) + "': cannot parse number '" +
                          std::string(text) + "'");
  }
  return value;
}

bool positive_definite(const Matrix& Q) {
  if (Q.rows() != Q.cols() || Q.rows() == 0) return false;
  if (!Q.isApprox(Q.transpose(), 1e-12)) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(Q, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff());
}

void check_dim(const Loss& loss, VectorRef z) {
  if (z.size() != loss.dim()) {
    throw InvalidArgument("loss " + loss.tag() + ": argument has dimension " +
                          std::to_string(z.size()) + ", expected " +
                          std::to_string(loss.dim()));
  }
}

// Gain of a homogeneous inner loss, used by the saturated wrappers.
double homogeneous_gain(const Loss& inner, double lam) {
  return std::visit(
      Overloaded{
          [&](const NormPower& k) { return std::pow(1.0 / lam, k.p); },
          [&](const Quadratic&) { return 1.0 / (lam * lam); },
          [&](const auto&) -> double {
            throw UnsupportedOperation("gh_gain: saturated losses need a homogeneous inner loss "
                                       "(norm power or quadratic), got " +
                                       inner.tag());
          },
      },
      inner.kind());
}

}  // namespace

Loss Loss::norm_power(Norm norm, double p, int dim) {
  if (!(p > 0.0)) throw InvalidArgument("norm power: p must be positive");
  if (dim <= 0) throw InvalidArgument("loss dimension must be positive");
  return Loss(NormPower{norm, p}, dim);
}

Loss Loss::quadratic(Matrix Q) {
  if (!positive_definite(Q)) {
    throw InvalidArgument("quadratic loss: Q must be symmetric positive definite");
  }
  const int dim = static_cast<int>(Q.rows());
  return Loss(Quadratic{std::move(Q)}, dim);
}

Loss Loss::saturated(const Loss& inner, double R0) {
  if (!(R0 > 0.0)) throw InvalidArgument("saturated loss: R0 must be positive");
  return Loss(Saturated{std::make_shared<const Loss>(inner), R0}, inner.dim());
}

Loss Loss::exp_saturated(const Loss& inner) {
  return Loss(ExpSaturated{std::make_shared<const Loss>(inner)}, inner.dim());
}

Loss Loss::block_l0(int dim, double tol) {
  if (dim <= 0) throw InvalidArgument("loss dimension must be positive");
  return Loss(BlockL0{tol}, dim);
}

Loss Loss::entry_l0(int dim, double tol) {
  if (dim <= 0) throw InvalidArgument("loss dimension must be positive");
  return Loss(EntryL0{tol}, dim);
}

Loss Loss::parse(std::string_view tag, int dim) {
  auto split = [](std::string_view s) {
    const auto pos = s.find(':');
    if (pos == std::string_view::npos) return std::pair{s, std::string_view{}};
    return std::pair{s.substr(0, pos), s.substr(pos + 1)};
  };
  const auto [head, rest] = split(tag);
  auto norm_tag = [&](Norm norm) {
    const double p = rest.empty() ? 1.0 : parse_number(rest, tag);
    return norm_power(norm, p, dim);
  };
  if (head == "l1") return norm_tag(Norm::L1);
  if (head == "l2") return norm_tag(Norm::L2);
  if (head == "linf") return norm_tag(Norm::Linf);
  if (head == "lp") {
    if (rest.empty()) throw InvalidArgument("loss tag 'lp' needs a power, e.g. lp:0.5");
    return norm_power(Norm::L2, parse_number(rest, tag), dim);
  }
  if (head == "quadratic" && rest.empty()) return quadratic_identity(dim);
  if (head == "sat") {
    const auto [r0, inner] = split(rest);
    if (r0.empty()) throw InvalidArgument("loss tag 'sat' needs a level, e.g. sat:5");
    return saturated(parse(inner.empty() ? "l1" : inner, dim), parse_number(r0, tag));
  }
  if (head == "exp") return exp_saturated(parse(rest.empty() ? "l1" : rest, dim));
  if (head == "l0-block" && rest.empty()) return block_l0(dim);
  if (head == "l0-entry" && rest.empty()) return entry_l0(dim);
  throw InvalidArgument("unknown loss tag '" + std::string(tag) + "'");
}

std::string Loss::tag() const {
  return std::visit(
      Overloaded{
          [](const NormPower& k) {
            const char* name = k.norm == Norm::L1 ? "l1" : (k.norm == Norm::L2 ? "l2" : "linf");
            return k.p == 1.0 ? std::string(name) : std::string(name) + ":" + format_number(k.p);
          },
          [](const Quadratic&) { return std::string("quadratic"); },
          [](const Saturated& k) { return "sat:" + format_number(k.R0) + ":" + k.inner->tag(); },
          [](const ExpSaturated& k) { return "exp:" + k.inner->tag(); },
          [](const BlockL0&) { return std::string("l0-block"); },
          [](const EntryL0&) { return std::string("l0-entry"); },
      },
      kind_);
}

bool Loss::is_convex() const {
  if (const auto* k = std::get_if<NormPower>(&kind_)) return k->p >= 1.0;
  return std::holds_alternative<Quadratic>(kind_);
}

bool Loss::is_polyhedral() const {
  const auto* k = std::get_if<NormPower>(&kind_);
  if (k == nullptr || k->p != 1.0) return false;
  return k->norm == Norm::L1 || dim_ == 1;
}

bool Loss::quadratic_form(Matrix* Q) const {
  if (const auto* k = std::get_if<Quadratic>(&kind_)) {
    if (Q) *Q = k->Q;
    return true;
  }
  if (const auto* k = std::get_if<NormPower>(&kind_); k && k->norm == Norm::L2 && k->p == 2.0) {
    if (Q) *Q = Matrix::Identity(dim_, dim_);
    return true;
  }
  return false;
}

bool Loss::is_l0() const {
  return std::holds_alternative<BlockL0>(kind_) || std::holds_alternative<EntryL0>(kind_);
}

double eval(const Loss& loss, VectorRef z) {
  check_dim(loss, z);
  return std::visit(
      Overloaded{
          [&](const NormPower& k) {
            const double r = norm_of(k.norm, z);
            return k.p == 1.0 ? r : std::pow(r, k.p);
          },
          [&](const Quadratic& k) { return z.dot(k.Q * z); },
          [&](const Saturated& k) { return std::min(eval(*k.inner, z), k.R0); },
          [&](const ExpSaturated& k) { return -std::expm1(-eval(*k.inner, z)); },
          [&](const BlockL0& k) {
            for (Eigen::Index i = 0; i < z.size(); ++i) {
              if (std::abs(z[i]) > k.tol) return 1.0;
            }
            return 0.0;
          },
          [&](const EntryL0& k) {
            double count = 0.0;
            for (Eigen::Index i = 0; i < z.size(); ++i) count += std::abs(z[i]) > k.tol ? 1.0 : 0.0;
            return count;
          },
      },
      loss.kind());
}

double gti_constant(const Loss& loss) {
  return std::visit(
      Overloaded{
          [](const NormPower& k) {
            return k.p <= 1.0 ? std::pow(2.0, 1.0 - 1.0 / k.p) : std::pow(2.0, 1.0 - k.p);
          },
          [](const Quadratic&) { return 0.5; },
          [](const Saturated& k) { return gti_constant(*k.inner); },
          [](const ExpSaturated& k) { return gti_constant(*k.inner); },
          [](const BlockL0&) { return 1.0; },
          [](const EntryL0&) { return 1.0; },
      },
      loss.kind());
}

double gh_gain(const Loss& loss, double lam) {
  if (!(lam > 0.0)) throw InvalidArgument("gh_gain: lam must be positive");
  return std::visit(
      Overloaded{
          [&](const NormPower& k) { return std::pow(1.0 / lam, k.p); },
          [&](const Quadratic&) { return 1.0 / (lam * lam); },
          // Inner gain clipped to [0, 1]; for the exponential wrapper this is
          // the infimum q*(1/lam) of the saturated ratio.
          [&](const Saturated& k) { return std::min(1.0, homogeneous_gain(*k.inner, lam)); },
          [&](const ExpSaturated& k) { return std::min(1.0, homogeneous_gain(*k.inner, lam)); },
          [&](const BlockL0&) { return 1.0; },
          [&](const EntryL0&) { return 1.0; },
      },
      loss.kind());
}

Vector prox(const Loss& loss, VectorRef v, double step) {
  check_dim(loss, v);
  if (!(step > 0.0)) throw InvalidArgument("prox: step must be positive");
  if (!loss.is_convex()) {
    throw UnsupportedOperation("prox: loss " + loss.tag() +
                               " is nonconvex; use the subgradient path");
  }
  if (const auto* k = std::get_if<Quadratic>(&loss.kind())) {
    const Matrix system = Matrix::Identity(loss.dim(), loss.dim()) + 2.0 * step * k->Q;
    return system.llt().solve(v);
  }
  const auto& k = std::get<NormPower>(loss.kind());
  if (k.p == 1.0) return prox_norm(k.norm, v, step);
  if (k.norm == Norm::L2 && k.p == 2.0) return v / (1.0 + 2.0 * step);
  return prox_norm_power(k.norm, k.p, v, step);
}

Vector subgradient(const Loss& loss, VectorRef z) {
  check_dim(loss, z);
  const auto n = z.size();
  return std::visit(
      Overloaded{
          [&](const NormPower& k) -> Vector {
            const double r = norm_of(k.norm, z);
            if (r == 0.0) return Vector::Zero(n);
            const double outer = k.p == 1.0 ? 1.0 : k.p * std::pow(r, k.p - 1.0);
            Vector g = Vector::Zero(n);
            switch (k.norm) {
              case Norm::L1:
                for (Eigen::Index i = 0; i < n; ++i) {
                  g[i] = z[i] > 0.0 ? 1.0 : (z[i] < 0.0 ? -1.0 : 0.0);
                }
                break;
              case Norm::L2:
                g = z / r;
                break;
              case Norm::Linf: {
                Eigen::Index imax = 0;
                z.cwiseAbs().maxCoeff(&imax);
                g[imax] = z[imax] > 0.0 ? 1.0 : -1.0;
                break;
              }
            }
            return outer * g;
          },
          [&](const Quadratic& k) -> Vector { return 2.0 * (k.Q * z); },
          [&](const Saturated& k) -> Vector {
            if (eval(*k.inner, z) >= k.R0) return Vector::Zero(n);
            return subgradient(*k.inner, z);
          },
          [&](const ExpSaturated& k) -> Vector {
            return std::exp(-eval(*k.inner, z)) * subgradient(*k.inner, z);
          },
          [&](const BlockL0&) -> Vector { return Vector::Zero(n); },
          [&](const EntryL0&) -> Vector { return Vector::Zero(n); },
      },
      loss.kind());
}

namespace {

Vector random_vector(int dim, Rng& rng) {
  const double scale = std::pow(10.0, rng.uniform(-3.0, 3.0));
  Vector z(dim);
  for (int i = 0; i < dim; ++i) z[i] = scale * rng.normal();
  // Occasional exact zeros exercise the l0 kinds and the kinks of l1.
  if (dim > 1 && rng.uniform() < 0.25) z[static_cast<int>(rng.below(dim))] = 0.0;
  return z;
}

bool violated(double lhs, double rhs, double magnitude) {
  return lhs < rhs - 1e-12 * std::max(magnitude, 1e-300);
}

}  // namespace

bool verify_gti(const LossFunction& f, int dim, double gamma, int samples, Rng& rng) {
  if (samples < 1) throw InvalidArgument("verify_gti: samples must be >= 1");
  for (int s = 0; s < samples; ++s) {
    const Vector z1 = random_vector(dim, rng);
    Vector z2;
    switch (s % 4) {
      case 0:
        z2 = random_vector(dim, rng);
        break;
      case 1:
        z2 = rng.uniform(-2.0, 2.0) * z1;
        break;
      case 2:
        z2 = rng.uniform(-2.0, 2.0) * z1 + 1e-3 * random_vector(dim, rng);
        break;
      default:
        z2 = 1e-4 * random_vector(dim, rng);
        break;
    }
    const double f12 = f(z1 - z2), f1 = f(z1), f2 = f(z2);
    if (violated(f12, gamma * f1 - f2, std::abs(f12) + gamma * f1 + f2)) return false;
  }
  return true;
}

bool verify_gti(const Loss& loss, double gamma, int samples, Rng& rng) {
  return verify_gti([&](const Vector& z) { return eval(loss, z); }, loss.dim(), gamma, samples,
                    rng);
}

bool verify_gh(const LossFunction& f, int dim, const GainFunction& gain, int samples, Rng& rng) {
  if (samples < 1) throw InvalidArgument("verify_gh: samples must be >= 1");
  for (int s = 0; s < samples; ++s) {
    const Vector z = random_vector(dim, rng);
    double lam = std::pow(10.0, rng.uniform(-2.0, 2.0));
    const double g = gain(lam);
    if (rng.uniform() < 0.5) lam = -lam;
    const double lhs = f(z), fl = f(lam * z);
    if (violated(lhs, g * fl, lhs + g * fl)) return false;
  }
  return true;
}

bool verify_gh(const Loss& loss, int samples, Rng& rng) {
  return verify_gh([&](const Vector& z) { return eval(loss, z); }, loss.dim(),
                   [&](double lam) { return gh_gain(loss, lam); }, samples, rng);
}

LossFamily::LossFamily(Loss base, std::vector<Matrix> weights, int count)
    : base_(std::move(base)), weights_(std::move(weights)), count_(count) {}

LossFamily LossFamily::identity(Loss base, int count) {
  if (count < 0) throw InvalidArgument("loss family: negative count");
  return LossFamily(std::move(base), {}, count);
}

LossFamily LossFamily::weighted(Loss base, std::vector<Matrix> weights) {
  const int d = base.dim();
  for (std::size_t t = 0; t < weights.size(); ++t) {
    const Matrix& w = weights[t];
    if (w.rows() != d || w.cols() != d) {
      throw InvalidArgument("loss family: weight " + std::to_string(t) + " is not " +
                            std::to_string(d) + "x" + std::to_string(d));
    }
    if (!(std::abs(w.determinant()) > 1e-12)) {
      throw InvalidArgument("loss family: weight " + std::to_string(t) + " is singular");
    }
  }
  const int count = static_cast<int>(weights.size());
  return LossFamily(std::move(base), std::move(weights), count);
}

LossFamily LossFamily::diagonal(Loss base, const std::vector<Vector>& diagonals) {
  std::vector<Matrix> weights;
  weights.reserve(diagonals.size());
  for (const auto& d : diagonals) weights.push_back(d.asDiagonal());
  return weighted(std::move(base), std::move(weights));
}

Matrix LossFamily::weight(int t) const {
  if (weights_.empty()) return Matrix::Identity(dim(), dim());
  return weights_.at(t);
}

Vector LossFamily::apply_weight(int t, VectorRef z) const {
  if (weights_.empty()) return z;
  return weights_.at(t) * z;
}

double LossFamily::eval(int t, VectorRef z) const {
  if (t < 0 || t >= size()) throw InvalidArgument("LossFamily::eval: index out of range");
  if (weights_.empty()) return resest::eval(base_, z);
  return resest::eval(base_, weights_[t] * z);
}

}  // namespace resest
