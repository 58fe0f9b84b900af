#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <limits>

#include "resest/error.hpp"
#include "resest/lp.hpp"
#include "resest/rng.hpp"

using namespace resest;

namespace {

// min c^T x over {A x <= b, x >= 0} by enumerating every vertex.
double vertex_oracle(const Vector& c, const Matrix& A, const Vector& b) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(A.rows());
  Matrix G(m + n, n);
  Vector h(m + n);
  G << A, -Matrix::Identity(n, n);
  h << b, Vector::Zero(n);
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> idx(n);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      Matrix S(n, n);
      Vector r(n);
      for (int i = 0; i < n; ++i) {
        S.row(i) = G.row(idx[i]);
        r(i) = h(idx[i]);
      }
      Eigen::FullPivLU<Matrix> lu(S);
      if (lu.rank() < n) return;
      const Vector x = lu.solve(r);
      if (((G * x - h).array() > 1e-9).any()) return;
      best = std::min(best, c.dot(x));
      return;
    }
    for (int k = start; k < m + n; ++k) {
      idx[depth] = k;
      rec(k + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace

TEST(Simplex, SmallKnownOptimum) {
  // max x + y s.t. x + 2y <= 4, 3x + y <= 6  ->  (8/5, 6/5), value 14/5.
  LinearProgram lp;
  lp.c = (Vector(2) << -1, -1).finished();
  lp.A_ub = (Matrix(2, 2) << 1, 2, 3, 1).finished();
  lp.b_ub = (Vector(2) << 4, 6).finished();
  const LpResult r = solve_lp(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.objective, -14.0 / 5, 1e-12);
  EXPECT_NEAR(r.x(0), 8.0 / 5, 1e-12);
  EXPECT_NEAR(r.x(1), 6.0 / 5, 1e-12);
  // Strong duality: c^T x = b^T y.
  EXPECT_NEAR(lp.b_ub.dot(r.y_ub), r.objective, 1e-10);
  EXPECT_TRUE((r.y_ub.array() <= 1e-12).all());
}

TEST(Simplex, EqualityFreeVariables) {
  // min |x - 3| via x free, x - a + b = 3, a, b >= 0, objective a + b.
  LinearProgram lp;
  lp.c = (Vector(3) << 0, 1, 1).finished();
  lp.A_eq = (Matrix(1, 3) << 1, -1, 1).finished();
  lp.b_eq = (Vector(1) << 3).finished();
  lp.free = {true, false, false};
  const LpResult r = solve_lp(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.objective, 0.0, 1e-12);
  EXPECT_NEAR(r.x(0), 3.0, 1e-12);
}

TEST(Simplex, InfeasibleAndUnbounded) {
  LinearProgram inf;
  inf.c = Vector::Ones(1);
  inf.A_ub = (Matrix(1, 1) << 1).finished();
  inf.b_ub = (Vector(1) << -1).finished();
  EXPECT_EQ(solve_lp(inf).status, LpStatus::Infeasible);

  LinearProgram unb;
  unb.c = (Vector(1) << -1).finished();
  unb.A_ub = (Matrix(1, 1) << -1).finished();
  unb.b_ub = (Vector(1) << 0).finished();
  EXPECT_EQ(solve_lp(unb).status, LpStatus::Unbounded);
}

TEST(Simplex, DegenerateCycleProne) {
  // Beale's example: cycles under textbook Dantzig pricing without safeguards.
  LinearProgram lp;
  lp.c = (Vector(4) << -0.75, 150, -0.02, 6).finished();
  lp.A_ub = (Matrix(3, 4) << 0.25, -60, -0.04, 9, 0.5, -90, -0.02, 3, 0, 0, 1, 0).finished();
  lp.b_ub = (Vector(3) << 0, 0, 1).finished();
  const LpResult r = solve_lp(lp);
  ASSERT_EQ(r.status, LpStatus::Optimal);
  EXPECT_NEAR(r.objective, -0.05, 1e-10);
}

TEST(Simplex, MatchesVertexEnumeration) {
  Rng rng(17);
  for (int k = 0; k < 40; ++k) {
    const int n = 2 + static_cast<int>(rng.below(2));
    const int m = 3 + static_cast<int>(rng.below(3));
    LinearProgram lp;
    lp.c = Vector(n);
    for (int j = 0; j < n; ++j) lp.c(j) = rng.normal();
    lp.A_ub = Matrix(m + n, n);
    lp.b_ub = Vector(m + n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) lp.A_ub(i, j) = rng.normal();
      lp.b_ub(i) = rng.uniform(0.1, 2.0);
    }
    // Box keeps every instance bounded.
    lp.A_ub.bottomRows(n) = Matrix::Identity(n, n);
    lp.b_ub.tail(n).setConstant(5.0);
    const LpResult r = solve_lp(lp);
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_NEAR(r.objective, vertex_oracle(lp.c, lp.A_ub, lp.b_ub), 1e-9) << "instance " << k;
  }
}

TEST(LinfMin, Examples) {
  Matrix basis(3, 1);
  basis << 1, 1, 1;
  const LinfMinResult r = linf_min(Vector::Ones(1), basis, 0);
  EXPECT_NEAR(r.value, 0.5, 1e-12);
  EXPECT_NEAR(r.coeffs(1), 0.5, 1e-12);
  EXPECT_NEAR(r.coeffs(2), 0.5, 1e-12);
  EXPECT_EQ(r.coeffs(0), 0.0);

  Matrix b2(3, 2);
  b2 << 1, 0, 0, 1, 1, 1;
  EXPECT_LE(linf_min(b2.row(1).transpose(), b2, 0).value, 1.0 + 1e-12);
  const LinfMinResult z = linf_min(Vector::Zero(2), b2, -1);
  EXPECT_NEAR(z.value, 0.0, 1e-14);
  EXPECT_NEAR(z.coeffs.norm(), 0.0, 1e-14);
}

TEST(LinfMin, OutsideSpanThrows) {
  Matrix basis(2, 2);
  basis << 1, 0, 1, 0;
  EXPECT_THROW(linf_min((Vector(2) << 0, 1).finished(), basis, -1), Infeasible);
}

// The minimal sup-norm coefficient vector against a 1-D scan over the null space.
TEST(LinfMin, MatchesNullSpaceScan) {
  Rng rng(4);
  for (int k = 0; k < 20; ++k) {
    // Three rows in R^2: coefficients form a line lambda0 + s * null.
    Matrix basis(3, 2);
    for (int i = 0; i < 6; ++i) basis.data()[i] = rng.normal();
    const Vector target = (Vector(2) << rng.normal(), rng.normal()).finished();
    const LinfMinResult r = linf_min(target, basis, -1);
    const Matrix Bt = basis.transpose();
    const Vector l0 = Bt.completeOrthogonalDecomposition().solve(target);
    Eigen::FullPivLU<Matrix> lu(Bt);
    const Vector nul = lu.kernel().col(0).normalized();
    double best = std::numeric_limits<double>::infinity();
    for (int i = -200000; i <= 200000; ++i) {
      const double s = i * 1e-4;
      best = std::min(best, (l0 + s * nul).cwiseAbs().maxCoeff());
    }
    EXPECT_NEAR(r.value, best, 1e-3 * (1 + best));
    EXPECT_LE(r.value, best + 1e-9);
    EXPECT_NEAR(r.dual_value, r.value, 1e-6 * (1 + r.value));
  }
}
