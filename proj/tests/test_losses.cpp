#include <gtest/gtest.h>

#include <cmath>

#include "resest/error.hpp"
#include "resest/losses.hpp"

using namespace resest;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

std::vector<Loss> every_kind(int dim) {
  const Loss l1 = Loss::norm_power(Norm::L1, 1.0, dim);
  return {
      l1,
      Loss::norm_power(Norm::L2, 1.0, dim),
      Loss::norm_power(Norm::Linf, 1.0, dim),
      Loss::norm_power(Norm::L2, 0.5, dim),
      Loss::norm_power(Norm::L1, 3.0, dim),
      Loss::quadratic_identity(dim),
      Loss::quadratic((Matrix(2, 2) << 2.0, 0.5, 0.5, 1.0).finished()),
      Loss::saturated(l1, 2.0),
      Loss::saturated(Loss::quadratic_identity(dim), 1.0),
      Loss::exp_saturated(l1),
      Loss::exp_saturated(Loss::quadratic_identity(dim)),
      Loss::block_l0(dim),
      Loss::entry_l0(dim),
  };
}

}  // namespace

TEST(LossEval, Examples) {
  EXPECT_DOUBLE_EQ(eval(Loss::quadratic_identity(2), vec({3, 4})), 25.0);
  EXPECT_DOUBLE_EQ(eval(Loss::norm_power(Norm::L2, 1.0, 2), vec({0, 0})), 0.0);
  const Loss e = Loss::exp_saturated(Loss::norm_power(Norm::L1, 1.0, 1));
  EXPECT_NEAR(eval(e, vec({std::log(2.0)})), 0.5, 1e-15);
}

TEST(LossEval, NormsAndPowers) {
  const Vector z = vec({3, -4});
  EXPECT_DOUBLE_EQ(eval(Loss::norm_power(Norm::L1, 1.0, 2), z), 7.0);
  EXPECT_DOUBLE_EQ(eval(Loss::norm_power(Norm::L2, 1.0, 2), z), 5.0);
  EXPECT_DOUBLE_EQ(eval(Loss::norm_power(Norm::Linf, 1.0, 2), z), 4.0);
  EXPECT_NEAR(eval(Loss::norm_power(Norm::L2, 0.5, 2), z), std::sqrt(5.0), 1e-15);
  EXPECT_DOUBLE_EQ(eval(Loss::saturated(Loss::norm_power(Norm::L1, 1.0, 2), 2.0), z), 2.0);
  EXPECT_DOUBLE_EQ(eval(Loss::block_l0(2), z), 1.0);
  EXPECT_DOUBLE_EQ(eval(Loss::entry_l0(2), vec({0, -4})), 1.0);
  EXPECT_DOUBLE_EQ(eval(Loss::block_l0(2), vec({0, 0})), 0.0);
}

TEST(LossEval, DimensionMismatchThrows) {
  EXPECT_THROW(eval(Loss::norm_power(Norm::L1, 1.0, 2), vec({1, 2, 3})), InvalidArgument);
}

TEST(LossEval, InvalidConstruction) {
  EXPECT_THROW(Loss::norm_power(Norm::L1, 0.0, 2), InvalidArgument);
  EXPECT_THROW(Loss::quadratic((Matrix(2, 2) << 1, 0, 0, -1).finished()), InvalidArgument);
  EXPECT_THROW(Loss::saturated(Loss::norm_power(Norm::L1, 1.0, 2), 0.0), InvalidArgument);
  EXPECT_THROW(Loss::parse("nonsense", 2), InvalidArgument);
}

TEST(LossParse, Tags) {
  EXPECT_TRUE(Loss::parse("quadratic", 3).quadratic_form());
  EXPECT_TRUE(Loss::parse("l1", 2).is_polyhedral());
  EXPECT_TRUE(Loss::parse("linf", 1).is_polyhedral());
  EXPECT_FALSE(Loss::parse("linf", 2).is_polyhedral());
  EXPECT_TRUE(Loss::parse("l2:2", 2).quadratic_form());
  EXPECT_FALSE(Loss::parse("lp:0.5", 2).is_convex());
  EXPECT_TRUE(Loss::parse("l0-block", 2).is_l0());
  EXPECT_FALSE(Loss::parse("sat:3", 2).is_convex());
  EXPECT_FALSE(Loss::parse("exp:quadratic", 2).is_convex());
  for (const char* tag : {"l1", "l2", "linf", "l1:3", "lp:0.5", "quadratic", "sat:2", "sat:1:quadratic",
                          "exp", "exp:quadratic", "l0-block", "l0-entry"}) {
    const Loss l = Loss::parse(tag, 2);
    const Loss back = Loss::parse(l.tag(), 2);
    const Vector z = vec({0.3, -1.7});
    EXPECT_DOUBLE_EQ(eval(back, z), eval(l, z)) << tag;
  }
}

TEST(LossGti, Constants) {
  EXPECT_DOUBLE_EQ(gti_constant(Loss::norm_power(Norm::L1, 1.0, 2)), 1.0);
  EXPECT_DOUBLE_EQ(gti_constant(Loss::quadratic((Matrix(2, 2) << 3, 1, 1, 2).finished())), 0.5);
  EXPECT_DOUBLE_EQ(gti_constant(Loss::norm_power(Norm::L2, 0.5, 2)), 0.5);
}

TEST(LossGh, Gains) {
  EXPECT_DOUBLE_EQ(gh_gain(Loss::quadratic_identity(2), 2.0), 0.25);
  EXPECT_DOUBLE_EQ(gh_gain(Loss::norm_power(Norm::L1, 1.0, 2), 1.0), 1.0);
  // Saturated kinds: min(1, gain of the inner loss).
  const Loss e = Loss::exp_saturated(Loss::quadratic_identity(2));
  EXPECT_DOUBLE_EQ(gh_gain(e, 2.0), 0.25);
  EXPECT_DOUBLE_EQ(gh_gain(e, 0.5), 1.0);
}

TEST(LossProx, ClosedForms) {
  const Loss l1 = Loss::norm_power(Norm::L1, 1.0, 1);
  EXPECT_NEAR(prox(l1, vec({2}), 1.0)(0), 1.0, 1e-14);
  EXPECT_NEAR(prox(Loss::quadratic_identity(1), vec({3}), 1.0)(0), 1.0, 1e-14);
  for (const Loss& l : every_kind(2)) {
    if (!l.is_convex()) continue;
    EXPECT_NEAR(prox(l, vec({0, 0}), 0.7).norm(), 0.0, 1e-14) << l.tag();
  }
  EXPECT_THROW(prox(Loss::block_l0(2), vec({1, 1}), 1.0), UnsupportedOperation);
}

// Prox of every convex kind against a direct 2-D grid minimization.
TEST(LossProx, MatchesGridSearch) {
  const Vector v = vec({1.3, -0.4});
  const double step = 0.6;
  for (const Loss& l : every_kind(2)) {
    if (!l.is_convex()) continue;
    const Vector p = prox(l, v, step);
    auto obj = [&](const Vector& u) { return eval(l, u) + (u - v).squaredNorm() / (2 * step); };
    double best = obj(p);
    // Refine around the coarse best point; the prox value must not be beaten.
    Vector c = Vector::Zero(2);
    double h = 1.0;
    double cbest = obj(c);
    for (int level = 0; level < 30; ++level) {
      for (int i = -10; i <= 10; ++i) {
        for (int k = -10; k <= 10; ++k) {
          Vector u = c + h * vec({i / 10.0, k / 10.0});
          const double f = obj(u);
          if (f < cbest) {
            cbest = f;
            c = u;
          }
        }
      }
      h *= 0.5;
    }
    EXPECT_LE(best, cbest + 1e-9) << l.tag();
    EXPECT_NEAR((p - c).norm(), 0.0, 1e-4) << l.tag();
  }
}

TEST(LossSubgradient, FiniteDifferences) {
  const Vector z = vec({0.8, -1.1});
  for (const Loss& l : every_kind(2)) {
    if (l.is_l0()) continue;
    const Vector g = subgradient(l, z);
    for (int i = 0; i < 2; ++i) {
      Vector zp = z, zm = z;
      zp(i) += 1e-6;
      zm(i) -= 1e-6;
      const double fd = (eval(l, zp) - eval(l, zm)) / 2e-6;
      EXPECT_NEAR(g(i), fd, 1e-4 * (1 + std::abs(fd))) << l.tag();
    }
  }
}

TEST(LossVerify, ExamplesFromTheDefinitions) {
  Rng rng(7);
  EXPECT_TRUE(verify_gti(Loss::norm_power(Norm::L1, 1.0, 2), 1.0, 10000, rng));
  EXPECT_TRUE(verify_gti(Loss::quadratic_identity(2), 0.5, 10000, rng));
  EXPECT_FALSE(verify_gti(Loss::norm_power(Norm::L1, 1.0, 2), 1.5, 10000, rng));
}

// GTI and growth-homogeneity with the reported constants, every kind.
TEST(LossVerify, EveryKindSatisfiesItsConstants) {
  for (int dim : {1, 2}) {
    for (const Loss& l : every_kind(dim)) {
      if (l.dim() != dim) continue;
      Rng rng(derive_seed(11, static_cast<std::uint64_t>(dim)));
      EXPECT_TRUE(verify_gti(l, gti_constant(l), 10000, rng)) << l.tag();
      EXPECT_TRUE(verify_gh(l, 10000, rng)) << l.tag();
    }
  }
}

TEST(LossVerify, TighterQuadraticConstantFails) {
  Rng rng(3);
  EXPECT_FALSE(verify_gti(Loss::quadratic_identity(2), 0.9, 10000, rng));
}

TEST(LossFamilyTest, Weights) {
  const Loss l1 = Loss::norm_power(Norm::L1, 1.0, 2);
  const LossFamily id = LossFamily::identity(l1, 3);
  EXPECT_EQ(id.size(), 3);
  EXPECT_TRUE(id.identity_weights());
  EXPECT_DOUBLE_EQ(id.eval(1, vec({1, -2})), 3.0);
  const LossFamily d = LossFamily::diagonal(l1, {vec({1, 1}), vec({2, 0.5}), vec({1, 3})});
  EXPECT_DOUBLE_EQ(d.eval(1, vec({1, -2})), 3.0);
  EXPECT_DOUBLE_EQ(d.eval(2, vec({1, -2})), 7.0);
  EXPECT_THROW(d.eval(3, vec({1, 1})), InvalidArgument);
}
