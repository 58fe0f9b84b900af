#include "resest/lp.hpp"

#include <cmath>
#include <limits>

#include "resest/error.hpp"

namespace resest {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

namespace {

class Tableau {
 public:
  Tableau(Matrix A, Vector b, std::vector<int> basis, const SimplexOptions& opts)
      : T_(A.rows(), A.cols() + 1), basis_(std::move(basis)), opts_(opts) {
    T_.leftCols(A.cols()) = A;
    T_.col(A.cols()) = b;
    allowed_.assign(A.cols(), true);
  }

  int rows() const { return static_cast<int>(T_.rows()); }
  int cols() const { return static_cast<int>(T_.cols()) - 1; }
  const std::vector<int>& basis() const { return basis_; }
  double rhs(int i) const { return T_(i, cols()); }
  double entry(int i, int j) const { return T_(i, j); }
  void forbid(int j) { allowed_[j] = false; }

  /// Runs primal simplex on cost `c`; returns the status.
  LpStatus optimize(const Vector& c, int& iterations) {
    const int m = rows(), N = cols();
    Vector d(N);
    auto reprice = [&] {
      for (int j = 0; j < N; ++j) {
        double s = c[j];
        for (int i = 0; i < m; ++i) s -= c[basis_[i]] * T_(i, j);
        d[j] = s;
      }
    };
    reprice();
    bool bland = false;
    int stall = 0;
    while (true) {
      if (iterations >= opts_.max_iterations) return LpStatus::IterationLimit;
      int enter = -1;
      double best = -opts_.feasibility_tolerance;
      for (int j = 0; j < N; ++j) {
        if (!allowed_[j] || d[j] >= best) continue;
        enter = j;
        if (bland) break;
        best = d[j];
      }
      if (enter < 0) {
        // Guard against drift in the incrementally updated prices.
        reprice();
        bool clean = true;
        for (int j = 0; j < N; ++j) {
          if (allowed_[j] && d[j] < -opts_.feasibility_tolerance) clean = false;
        }
        if (clean) return LpStatus::Optimal;
        continue;
      }
      int leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        const double a = T_(i, enter);
        if (a <= opts_.pivot_tolerance) continue;
        const double q = std::max(rhs(i), 0.0) / a;
        if (q < ratio - 1e-12 ||
            (q <= ratio + 1e-12 && leave >= 0 && basis_[i] < basis_[leave])) {
          ratio = std::min(ratio, q);
          leave = i;
        }
      }
      if (leave < 0) return LpStatus::Unbounded;
      stall = ratio <= 1e-12 ? stall + 1 : 0;
      if (stall > opts_.stall_limit) bland = true;
      pivot(leave, enter);
      const double de = d[enter];
      for (int j = 0; j < N; ++j) d[j] -= de * T_(leave, j);
      ++iterations;
    }
  }

  void pivot(int r, int j) {
    T_.row(r) /= T_(r, j);
    for (int i = 0; i < rows(); ++i) {
      if (i == r) continue;
      const double f = T_(i, j);
      if (f != 0.0) T_.row(i) -= f * T_.row(r);
    }
    basis_[r] = j;
  }

 private:
  Matrix T_;
  std::vector<int> basis_;
  std::vector<bool> allowed_;
  SimplexOptions opts_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, const SimplexOptions& opts) {
  const int nv = static_cast<int>(lp.c.size());
  const int meq = static_cast<int>(lp.A_eq.rows());
  const int mub = static_cast<int>(lp.A_ub.rows());
  if ((meq > 0 && lp.A_eq.cols() != nv) || (mub > 0 && lp.A_ub.cols() != nv) ||
      lp.b_eq.size() != meq || lp.b_ub.size() != mub) {
    throw InvalidArgument("solve_lp: inconsistent problem dimensions");
  }
  if (!lp.free.empty() && static_cast<int>(lp.free.size()) != nv) {
    throw InvalidArgument("solve_lp: free flags must match the variable count");
  }
  const int m = meq + mub;

  // Column layout: original (positive parts), negative parts of free
  // variables, slacks, artificials.
  std::vector<int> neg_col(nv, -1);
  int N = nv;
  for (int j = 0; j < nv; ++j) {
    if (!lp.free.empty() && lp.free[j]) neg_col[j] = N++;
  }
  const int slack0 = N;
  N += mub;

  Matrix A = Matrix::Zero(m, N);
  Vector b(m);
  std::vector<double> sign(m, 1.0);
  for (int i = 0; i < m; ++i) {
    const bool eq = i < meq;
    for (int j = 0; j < nv; ++j) {
      const double a = eq ? lp.A_eq(i, j) : lp.A_ub(i - meq, j);
      A(i, j) = a;
      if (neg_col[j] >= 0) A(i, neg_col[j]) = -a;
    }
    if (!eq) A(i, slack0 + (i - meq)) = 1.0;
    b[i] = eq ? lp.b_eq[i] : lp.b_ub[i - meq];
    if (b[i] < 0.0) {
      A.row(i) *= -1.0;
      b[i] = -b[i];
      sign[i] = -1.0;
    }
  }

  // Reuse existing unit columns as the starting basis where possible.
  std::vector<int> basis(m, -1);
  for (int j = N - 1; j >= 0; --j) {
    int hit = -1;
    bool unit = true;
    for (int i = 0; i < m && unit; ++i) {
      if (A(i, j) == 0.0) continue;
      if (A(i, j) == 1.0 && hit < 0) {
        hit = i;
      } else {
        unit = false;
      }
    }
    if (unit && hit >= 0 && basis[hit] < 0) basis[hit] = j;
  }
  std::vector<int> artificial_rows;
  for (int i = 0; i < m; ++i) {
    if (basis[i] < 0) artificial_rows.push_back(i);
  }
  const int nart = static_cast<int>(artificial_rows.size());
  const int Ntot = N + nart;
  Matrix Afull = Matrix::Zero(m, Ntot);
  Afull.leftCols(N) = A;
  for (int k = 0; k < nart; ++k) {
    Afull(artificial_rows[k], N + k) = 1.0;
    basis[artificial_rows[k]] = N + k;
  }

  Tableau tab(Afull, b, basis, opts);
  LpResult res;
  if (nart > 0) {
    Vector c1 = Vector::Zero(Ntot);
    c1.tail(nart).setOnes();
    const LpStatus s1 = tab.optimize(c1, res.iterations);
    if (s1 == LpStatus::IterationLimit) {
      res.status = s1;
      return res;
    }
    double infeas = 0.0;
    for (int i = 0; i < m; ++i) {
      if (tab.basis()[i] >= N) infeas += tab.rhs(i);
    }
    if (infeas > opts.feasibility_tolerance * (1.0 + b.lpNorm<Eigen::Infinity>())) {
      res.status = LpStatus::Infeasible;
      return res;
    }
    // Drive zero-level artificials out; rows that cannot pivot are redundant.
    for (int i = 0; i < m; ++i) {
      if (tab.basis()[i] < N) continue;
      int best = -1;
      double mag = opts.pivot_tolerance;
      for (int j = 0; j < N; ++j) {
        if (std::abs(tab.entry(i, j)) > mag) {
          mag = std::abs(tab.entry(i, j));
          best = j;
        }
      }
      if (best >= 0) tab.pivot(i, best);
    }
    for (int k = 0; k < nart; ++k) tab.forbid(N + k);
  }

  Vector c2 = Vector::Zero(Ntot);
  c2.head(nv) = lp.c;
  for (int j = 0; j < nv; ++j) {
    if (neg_col[j] >= 0) c2[neg_col[j]] = -lp.c[j];
  }
  res.status = tab.optimize(c2, res.iterations);
  if (res.status != LpStatus::Optimal) return res;

  // Recover the vertex from the original data for accuracy.
  Matrix B(m, m);
  Vector cB(m);
  for (int i = 0; i < m; ++i) {
    B.col(i) = Afull.col(tab.basis()[i]);
    cB[i] = c2[tab.basis()[i]];
  }
  Eigen::PartialPivLU<Matrix> lu(B);
  Vector xB = lu.solve(b);
  Vector xs = Vector::Zero(Ntot);
  for (int i = 0; i < m; ++i) xs[tab.basis()[i]] = std::max(xB[i], 0.0);
  Vector y = lu.transpose().solve(cB);
  if (!xB.allFinite() || !y.allFinite()) {
    xs.setZero();
    for (int i = 0; i < m; ++i) xs[tab.basis()[i]] = std::max(tab.rhs(i), 0.0);
    y.setZero();
  }

  res.x.resize(nv);
  for (int j = 0; j < nv; ++j) res.x[j] = xs[j] - (neg_col[j] >= 0 ? xs[neg_col[j]] : 0.0);
  res.objective = lp.c.dot(res.x);
  for (int i = 0; i < m; ++i) y[i] *= sign[i];
  res.y_eq = y.head(meq);
  res.y_ub = y.tail(mub);
  return res;
}

LinfMinResult linf_min(VectorRef target, const Matrix& basis, int excluded) {
  const int K = static_cast<int>(basis.rows());
  const int n = static_cast<int>(basis.cols());
  if (target.size() != n) throw InvalidArgument("linf_min: target/basis dimension mismatch");
  if (excluded < -1 || excluded >= K) throw InvalidArgument("linf_min: excluded index out of range");

  std::vector<int> active;
  for (int k = 0; k < K; ++k) {
    if (k != excluded) active.push_back(k);
  }
  const int Ka = static_cast<int>(active.size());
  LinfMinResult out;
  out.coeffs = Vector::Zero(K);
  if (target.lpNorm<Eigen::Infinity>() == 0.0) return out;
  if (Ka == 0) throw Infeasible("linf_min: target is outside the span of the basis");

  // Variables: p (Ka), q (Ka), u. lambda = p - q, p_k + q_k <= u.
  LinearProgram lp;
  const int nv = 2 * Ka + 1;
  lp.c = Vector::Zero(nv);
  lp.c[nv - 1] = 1.0;
  lp.A_eq = Matrix::Zero(n, nv);
  lp.b_eq = target;
  lp.A_ub = Matrix::Zero(Ka, nv);
  lp.b_ub = Vector::Zero(Ka);
  for (int a = 0; a < Ka; ++a) {
    lp.A_eq.col(a) = basis.row(active[a]).transpose();
    lp.A_eq.col(Ka + a) = -basis.row(active[a]).transpose();
    lp.A_ub(a, a) = 1.0;
    lp.A_ub(a, Ka + a) = 1.0;
    lp.A_ub(a, nv - 1) = -1.0;
  }
  const LpResult r = solve_lp(lp);
  if (r.status == LpStatus::Infeasible) {
    throw Infeasible("linf_min: target is outside the span of the basis");
  }
  if (r.status != LpStatus::Optimal) {
    throw PreconditionViolation(std::string("linf_min: simplex ended with status ") +
                                to_string(r.status));
  }
  for (int a = 0; a < Ka; ++a) out.coeffs[active[a]] = r.x[a] - r.x[Ka + a];
  out.value = out.coeffs.lpNorm<Eigen::Infinity>();
  const Vector recon = basis.transpose() * out.coeffs;
  out.residual = (Vector(target) - recon).lpNorm<Eigen::Infinity>();
  const double scale = 1.0 + target.lpNorm<Eigen::Infinity>();
  if (out.residual > 1e-8 * scale) {
    throw PreconditionViolation("linf_min: feasibility residual " + std::to_string(out.residual) +
                                " exceeds 1e-8");
  }
  // Dual: max target^T y s.t. sum_k |basis_k . y| <= 1.
  const Vector y = r.y_eq;
  double l1 = 0.0;
  for (int a = 0; a < Ka; ++a) l1 += std::abs(basis.row(active[a]).dot(y));
  out.dual_value = target.dot(y) / std::max(1.0, l1);
  if (out.value - out.dual_value > 1e-6 * (1.0 + out.value)) {
    throw PreconditionViolation("linf_min: duality gap " +
                                std::to_string(out.value - out.dual_value) + " exceeds 1e-6");
  }
  return out;
}

}  // namespace resest
