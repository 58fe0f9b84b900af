#include "resest/admm.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "resest/error.hpp"

namespace resest {

const char* to_string(SolverMethod method) {
  switch (method) {
    case SolverMethod::Auto: return "auto";
    case SolverMethod::Admm: return "admm";
    case SolverMethod::ClosedForm: return "closed-form";
    case SolverMethod::Lp: return "lp";
    case SolverMethod::Subgradient: return "subgradient";
    case SolverMethod::Exhaustive: return "exhaustive";
  }
  return "unknown";
}

namespace {

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

}  // namespace

AdmmResult solve_admm(const AdmmProblem& pb, const SolverOptions& opts) {
  const Eigen::Index N = pb.P.rows();
  const Eigen::Index m = pb.L.rows();
  if (pb.P.cols() != N || pb.q.size() != N || pb.L.cols() != N || pb.c.size() != m) {
    throw InvalidArgument("solve_admm: inconsistent problem dimensions");
  }
  {
    Eigen::Index covered = 0;
    for (const auto& b : pb.blocks) {
      if (b.loss == nullptr || b.offset != covered) {
        throw InvalidArgument("solve_admm: blocks must tile the rows of L in order");
      }
      covered += b.loss->dim();
    }
    if (covered != m) throw InvalidArgument("solve_admm: blocks do not cover L");
  }
  if (!(opts.penalty > 0.0)) throw InvalidArgument("solve_admm: penalty must be positive");

  const SparseMatrix Lt = pb.L.transpose();
  const SparseMatrix LtL = Lt * pb.L;
  double rho = opts.penalty;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  SparseMatrix K = pb.P + rho * LtL;
  ldlt.analyzePattern(K);
  auto factor = [&] {
    K = pb.P + rho * LtL;
    ldlt.factorize(K);
    if (ldlt.info() != Eigen::Success) {
      throw PreconditionViolation("solve_admm: KKT matrix is not positive definite");
    }
  };
  factor();

  AdmmResult res;
  res.z = Vector::Zero(N);
  res.s = pb.c;
  res.u = Vector::Zero(m);
  Vector s_prev(m), u_prev(m), Lzc(m), v(m), rhs(N);
  const double c_norm = inf_norm(pb.c);
  double prev_merit = -1.0;
  bool rho_changed = true;
  // Doubling gaps between penalty updates keep their number finite, which
  // preserves the fixed-penalty convergence guarantee.
  int next_adapt = 25;

  for (int k = 1; k <= opts.max_iterations; ++k) {
    rhs = -pb.q + rho * (Lt * (res.s - pb.c - res.u));
    res.z = ldlt.solve(rhs);
    Lzc = pb.L * res.z + pb.c;
    v = Lzc + res.u;
    s_prev = res.s;
    u_prev = res.u;
    for (const auto& b : pb.blocks) {
      const int d = b.loss->dim();
      res.s.segment(b.offset, d) = prox(*b.loss, v.segment(b.offset, d), b.scale / rho);
    }
    res.u += Lzc - res.s;

    res.iterations = k;
    res.primal_residual = inf_norm(Lzc - res.s);
    const Vector dual = rho * (Lt * (res.s - s_prev));
    res.dual_residual = inf_norm(dual);
    const double lz_norm = inf_norm(Lzc - pb.c);
    const double scale_p = std::max({lz_norm, inf_norm(res.s), c_norm});
    const Vector Ltu = rho * (Lt * res.u);
    const Vector Pz = pb.P * res.z;
    const double scale_d = std::max({inf_norm(Ltu), inf_norm(Pz), inf_norm(pb.q)});
    res.primal_tolerance = opts.tolerance + opts.relative_tolerance * scale_p;
    res.dual_tolerance = opts.tolerance + opts.relative_tolerance * scale_d;

    if (opts.check_monotone) {
      const double merit = (res.s - s_prev).squaredNorm() + (res.u - u_prev).squaredNorm();
      if (!rho_changed && prev_merit >= 0.0) {
        ++res.monotone_checks;
        if (merit > prev_merit * (1.0 + 1e-9) + 1e-28) ++res.monotone_violations;
      }
      prev_merit = merit;
    }
    rho_changed = false;

    if (opts.verbosity > 1 && k % 1000 == 0) {
      std::fprintf(stderr, "admm %6d  r=%.3e  d=%.3e  rho=%.3e\n", k, res.primal_residual,
                   res.dual_residual, rho);
    }
    if (res.primal_residual <= res.primal_tolerance && res.dual_residual <= res.dual_tolerance) {
      res.converged = true;
      break;
    }

    if (opts.adaptive_penalty && k == next_adapt) {
      next_adapt *= 2;
      // Raw residual balancing: the dual scale rho ||L'u|| vanishes at the
      // optimum when the smooth part is zero, which defeats a normalized test.
      const double rp = res.primal_residual;
      const double rd = res.dual_residual;
      if (rp > 0.0 && rd > 0.0) {
        const double ratio = std::clamp(std::sqrt(rp / rd), 0.1, 10.0);
        if (ratio > 5.0 || ratio < 0.2) {
          const double next = std::clamp(rho * ratio, 1e-6, 1e8);
          if (next != rho) {
            res.u *= rho / next;
            rho = next;
            factor();
            rho_changed = true;
          }
        }
      }
    }
  }
  res.rho = rho;
  return res;
}

}  // namespace resest
