#pragma once

#include <cmath>
#include <initializer_list>
#include <vector>

#include "resest/losses.hpp"
#include "resest/ltv.hpp"
#include "resest/rng.hpp"

namespace testing_helpers {

using namespace resest;

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

inline Matrix gaussian(Rng& rng, int rows, int cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
  return m;
}

/// Random LTV system with roughly unit-gain dynamics.
inline LtvSystem random_ltv(Rng& rng, int n, int ny, int T) {
  std::vector<Matrix> A, C;
  for (int t = 0; t + 1 < T; ++t) A.push_back(gaussian(rng, n, n, 1.0 / std::sqrt(n)));
  for (int t = 0; t < T; ++t) C.push_back(gaussian(rng, ny, n));
  return LtvSystem(A, C);
}

/// Minimizer of lambda sum (z_{t+1} - A_t z_t)^T Qw (.) + sum (y_t - C_t z_t)^T Qv (.)
/// from the dense normal equations on vec(Z).
inline Matrix dense_quadratic_oracle(const LtvSystem& sys, const Matrix& Y, const Matrix& Qw,
                                     const Matrix& Qv, double lambda) {
  const int n = sys.n(), ny = sys.ny(), T = sys.horizon();
  Matrix D = Matrix::Zero(n * (T - 1), n * T);
  for (int t = 0; t + 1 < T; ++t) {
    D.block(n * t, n * t, n, n) = -sys.A(t);
    D.block(n * t, n * (t + 1), n, n) = Matrix::Identity(n, n);
  }
  Matrix Cb = Matrix::Zero(ny * T, n * T);
  Matrix Qwb = Matrix::Zero(n * (T - 1), n * (T - 1));
  Matrix Qvb = Matrix::Zero(ny * T, ny * T);
  Vector y(ny * T);
  for (int t = 0; t < T; ++t) {
    Cb.block(ny * t, n * t, ny, n) = sys.C(t);
    Qvb.block(ny * t, ny * t, ny, ny) = Qv;
    y.segment(ny * t, ny) = Y.col(t);
    if (t + 1 < T) Qwb.block(n * t, n * t, n, n) = Qw;
  }
  const Matrix H = lambda * D.transpose() * Qwb * D + Cb.transpose() * Qvb * Cb;
  const Vector z = H.fullPivLu().solve(Cb.transpose() * Qvb * y);
  return Eigen::Map<const Matrix>(z.data(), n, T);
}

enum class PenaltyKind { Quadratic, L1, L2 };

inline double smoothed_penalty(PenaltyKind kind, const Vector& v, double mu, Vector* g, Matrix* H) {
  const Eigen::Index d = v.size();
  switch (kind) {
    case PenaltyKind::Quadratic:
      if (g) *g = 2 * v;
      if (H) *H = 2 * Matrix::Identity(d, d);
      return v.squaredNorm();
    case PenaltyKind::L1: {
      double f = 0;
      if (g) g->resize(d);
      if (H) *H = Matrix::Zero(d, d);
      for (Eigen::Index i = 0; i < d; ++i) {
        const double r = std::sqrt(v(i) * v(i) + mu * mu);
        f += r - mu;
        if (g) (*g)(i) = v(i) / r;
        if (H) (*H)(i, i) = mu * mu / (r * r * r);
      }
      return f;
    }
    case PenaltyKind::L2: {
      const double r = std::sqrt(v.squaredNorm() + mu * mu);
      if (g) *g = v / r;
      if (H) *H = (Matrix::Identity(d, d) - v * v.transpose() / (r * r)) / r;
      return r - mu;
    }
  }
  return 0;
}

/// Minimum of lambda sum phi(z_{t+1} - A_t z_t) + sum psi(y_t - C_t z_t) for
/// phi, psi in {squared 2-norm, 1-norm, 2-norm}: damped Newton on a smoothed
/// objective with continuation in the smoothing width. Returns the exact
/// (unsmoothed) objective at the final point.
inline double smoothed_newton_oracle(const LtvSystem& sys, const Matrix& Y, PenaltyKind phi, PenaltyKind psi,
                                     double lambda) {
  const int n = sys.n(), ny = sys.ny(), T = sys.horizon();
  const int N = n * T;
  Matrix D = Matrix::Zero(n * (T - 1), N);
  for (int t = 0; t + 1 < T; ++t) {
    D.block(n * t, n * t, n, n) = -sys.A(t);
    D.block(n * t, n * (t + 1), n, n) = Matrix::Identity(n, n);
  }
  Matrix Cb = Matrix::Zero(ny * T, N);
  Vector y(ny * T);
  for (int t = 0; t < T; ++t) {
    Cb.block(ny * t, n * t, ny, n) = sys.C(t);
    y.segment(ny * t, ny) = Y.col(t);
  }
  auto eval = [&](const Vector& z, double mu, Vector* g, Matrix* H) {
    const Vector w = D * z, r = y - Cb * z;
    double f = 0;
    if (g) *g = Vector::Zero(N);
    if (H) *H = Matrix::Zero(N, N);
    Vector gb;
    Matrix Hb;
    for (int t = 0; t + 1 < T; ++t) {
      f += lambda * smoothed_penalty(phi, w.segment(n * t, n), mu, g ? &gb : nullptr, H ? &Hb : nullptr);
      const auto Dt = D.middleRows(n * t, n);
      if (g) *g += lambda * Dt.transpose() * gb;
      if (H) *H += lambda * Dt.transpose() * Hb * Dt;
    }
    for (int t = 0; t < T; ++t) {
      f += smoothed_penalty(psi, r.segment(ny * t, ny), mu, g ? &gb : nullptr, H ? &Hb : nullptr);
      const auto Ct = Cb.middleRows(ny * t, ny);
      if (g) *g -= Ct.transpose() * gb;
      if (H) *H += Ct.transpose() * Hb * Ct;
    }
    return f;
  };
  Vector z = Vector::Zero(N);
  for (double mu = 1.0; mu >= 1e-10; mu *= 0.1) {
    for (int it = 0; it < 200; ++it) {
      Vector g;
      Matrix H;
      const double f = eval(z, mu, &g, &H);
      H += 1e-12 * (1.0 + H.diagonal().cwiseAbs().maxCoeff()) * Matrix::Identity(N, N);
      const Vector step = -H.ldlt().solve(g);
      const double decrement = -g.dot(step);
      if (decrement < 1e-14 * (1.0 + std::abs(f))) break;
      double a = 1.0;
      while (a > 1e-12 && eval(z + a * step, mu, nullptr, nullptr) > f - 0.25 * a * decrement) a *= 0.5;
      z += a * step;
    }
  }
  return eval(z, 0.0, nullptr, nullptr);
}

}  // namespace testing_helpers
