#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "resest/rng.hpp"

namespace resest {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

/// An entry counts as nonzero for the l0 losses when |z_i| exceeds this.
inline constexpr double kDefaultL0Tolerance = 1e-9;

enum class Norm { L1, L2, Linf };

class Loss;

/// xi(z) = ||z||^p, p > 0.
struct NormPower {
  Norm norm = Norm::L2;
  double p = 1.0;
};

/// xi(z) = z^T Q z with Q symmetric positive definite.
struct Quadratic {
  Matrix Q;
};

/// xi(z) = min(inner(z), R0).
struct Saturated {
  std::shared_ptr<const Loss> inner;
  double R0 = 1.0;
};

/// xi(z) = 1 - exp(-inner(z)), range [0, 1).
struct ExpSaturated {
  std::shared_ptr<const Loss> inner;
};

/// 1 if any entry is nonzero, else 0.
struct BlockL0 {
  double tol = kDefaultL0Tolerance;
};

/// Number of nonzero entries.
struct EntryL0 {
  double tol = kDefaultL0Tolerance;
};

using LossKind = std::variant<NormPower, Quadratic, Saturated, ExpSaturated, BlockL0, EntryL0>;

/// Immutable loss-function descriptor on R^dim.
class Loss {
 public:
  static Loss norm_power(Norm norm, double p, int dim);
  static Loss quadratic(Matrix Q);
  static Loss quadratic_identity(int dim) { return quadratic(Matrix::Identity(dim, dim)); }
  static Loss saturated(const Loss& inner, double R0);
  static Loss exp_saturated(const Loss& inner);
  static Loss block_l0(int dim, double tol = kDefaultL0Tolerance);
  static Loss entry_l0(int dim, double tol = kDefaultL0Tolerance);

  /// Builds a loss from a CLI tag:
  ///   l1, l2, linf           norms (p = 1)
  ///   l1:P, l2:P, linf:P     norm to the power P
  ///   lp:P                   ||.||_2^P
  ///   quadratic              z^T z
  ///   sat:R0[:INNER]         min(INNER, R0), INNER defaults to l1
  ///   exp[:INNER]            1 - exp(-INNER), INNER defaults to l1
  ///   l0-block, l0-entry
  static Loss parse(std::string_view tag, int dim);

  int dim() const { return dim_; }
  const LossKind& kind() const { return kind_; }
  std::string tag() const;

  /// Convex kinds: NormPower with p >= 1, Quadratic.
  bool is_convex() const;
  /// Piecewise-linear kinds that admit an exact LP treatment:
  /// L1 with p = 1, or any norm with p = 1 in dimension one.
  bool is_polyhedral() const;
  /// Quadratic kinds (Quadratic, NormPower L2 with p = 2); fills `Q`.
  bool quadratic_form(Matrix* Q = nullptr) const;
  bool is_l0() const;

 private:
  Loss(LossKind kind, int dim) : kind_(std::move(kind)), dim_(dim) {}
  LossKind kind_;
  int dim_;
};

double eval(const Loss& loss, VectorRef z);

/// Constant gamma of the generalized triangle inequality
/// xi(z1 - z2) >= gamma xi(z1) - xi(z2).
double gti_constant(const Loss& loss);

/// Gain q(1/lam) with xi(z) >= q(1/lam) xi(lam z) for all z.
double gh_gain(const Loss& loss, double lam);

/// argmin_u loss(u) + ||u - v||^2 / (2 step). Convex kinds only.
Vector prox(const Loss& loss, VectorRef v, double step);

/// An element of the (Clarke) subdifferential; zero where none is informative.
Vector subgradient(const Loss& loss, VectorRef z);

using LossFunction = std::function<double(const Vector&)>;
using GainFunction = std::function<double(double)>;

/// Randomized check of the GTI with constant `gamma` over `samples` pairs.
bool verify_gti(const LossFunction& f, int dim, double gamma, int samples, Rng& rng);
bool verify_gti(const Loss& loss, double gamma, int samples, Rng& rng);

/// Randomized check of xi(z) >= gain(lam) xi(lam z) over `samples` draws.
bool verify_gh(const LossFunction& f, int dim, const GainFunction& gain, int samples, Rng& rng);
bool verify_gh(const Loss& loss, int samples, Rng& rng);

/// psi_t(e) = base(V_t e), one nonsingular weight per time index.
/// An empty weight sequence means identity weights.
class LossFamily {
 public:
  static LossFamily identity(Loss base, int count);
  static LossFamily weighted(Loss base, std::vector<Matrix> weights);
  /// Diagonal weights given by their diagonals.
  static LossFamily diagonal(Loss base, const std::vector<Vector>& diagonals);

  const Loss& base() const { return base_; }
  int size() const { return count_; }
  int dim() const { return base_.dim(); }
  bool identity_weights() const { return weights_.empty(); }
  Matrix weight(int t) const;
  Vector apply_weight(int t, VectorRef z) const;
  double eval(int t, VectorRef z) const;

 private:
  LossFamily(Loss base, std::vector<Matrix> weights, int count);
  Loss base_;
  std::vector<Matrix> weights_;
  int count_;
};

}  // namespace resest
