#include "resest/solver.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <cstdio>
#include <limits>

#include "resest/error.hpp"
#include "resest/lp.hpp"

namespace resest {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void add_block(Triplets& trip, Eigen::Index r0, Eigen::Index c0, const Matrix& B) {
  for (Eigen::Index j = 0; j < B.cols(); ++j) {
    for (Eigen::Index i = 0; i < B.rows(); ++i) {
      if (B(i, j) != 0.0) trip.emplace_back(r0 + i, c0 + j, B(i, j));
    }
  }
}

void validate(const ObjectiveSpec& obj) {
  const LtvSystem& sys = obj.sys;
  const int T = sys.horizon();
  if (obj.Y.rows() != sys.ny() || obj.Y.cols() != T) {
    throw InvalidArgument("objective: Y must be ny x T");
  }
  if (obj.phi.dim() != sys.n() || obj.psi.dim() != sys.ny()) {
    throw InvalidArgument("objective: loss dimensions do not match the system");
  }
  if (obj.phi.size() < T - 1 || obj.psi.size() < T) {
    throw InvalidArgument("objective: loss families are shorter than the horizon");
  }
  if (!(obj.lambda > 0.0)) throw InvalidArgument("objective: lambda must be positive");
}

/// Process residual rows W_t (z_{t+1} - A_t z_t), stacked.
SparseMatrix process_operator(const ObjectiveSpec& obj) {
  const LtvSystem& sys = obj.sys;
  const int n = sys.n(), T = sys.horizon();
  Triplets trip;
  for (int t = 0; t + 1 < T; ++t) {
    const Matrix W = obj.phi.weight(t);
    add_block(trip, static_cast<Eigen::Index>(t) * n, static_cast<Eigen::Index>(t) * n,
              -W * sys.A(t));
    add_block(trip, static_cast<Eigen::Index>(t) * n, static_cast<Eigen::Index>(t + 1) * n, W);
  }
  SparseMatrix G(static_cast<Eigen::Index>(T - 1) * n, static_cast<Eigen::Index>(T) * n);
  G.setFromTriplets(trip.begin(), trip.end());
  return G;
}

/// Output residual V_t (y_t - C_t z_t) = H z + h, stacked.
SparseMatrix output_operator(const ObjectiveSpec& obj, Vector* h) {
  const LtvSystem& sys = obj.sys;
  const int n = sys.n(), ny = sys.ny(), T = sys.horizon();
  Triplets trip;
  h->resize(static_cast<Eigen::Index>(T) * ny);
  for (int t = 0; t < T; ++t) {
    const Matrix V = obj.psi.weight(t);
    add_block(trip, static_cast<Eigen::Index>(t) * ny, static_cast<Eigen::Index>(t) * n,
              -V * sys.C(t));
    h->segment(static_cast<Eigen::Index>(t) * ny, ny) = V * obj.Y.col(t);
  }
  SparseMatrix H(static_cast<Eigen::Index>(T) * ny, static_cast<Eigen::Index>(T) * n);
  H.setFromTriplets(trip.begin(), trip.end());
  return H;
}

SparseMatrix block_diagonal(const Matrix& Q, int count) {
  Triplets trip;
  for (int k = 0; k < count; ++k) {
    add_block(trip, static_cast<Eigen::Index>(k) * Q.rows(), static_cast<Eigen::Index>(k) * Q.cols(),
              Q);
  }
  SparseMatrix D(Q.rows() * count, Q.cols() * count);
  D.setFromTriplets(trip.begin(), trip.end());
  return D;
}

SparseMatrix sparse_identity(Eigen::Index n) {
  SparseMatrix I(n, n);
  I.setIdentity();
  return I;
}

Matrix unvec(const Vector& z, int rows, int cols) {
  return Eigen::Map<const Matrix>(z.data(), rows, cols);
}

Vector vec(const Matrix& Z) { return Eigen::Map<const Vector>(Z.data(), Z.size()); }

/// Smallest increase of f along +- coordinate probes.
double probe_flatness(const std::function<double(const Vector&)>& f, const Vector& z) {
  const double f0 = f(z);
  const double h = 1e-4 * (1.0 + (z.size() ? z.lpNorm<Eigen::Infinity>() : 0.0));
  double best = std::numeric_limits<double>::infinity();
  Vector probe = z;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    for (double sgn : {1.0, -1.0}) {
      probe[i] = z[i] + sgn * h;
      best = std::min(best, f(probe) - f0);
    }
    probe[i] = z[i];
  }
  return best;
}

Loss convex_surrogate(const Loss& loss) {
  if (loss.is_convex()) return loss;
  return Loss::norm_power(Norm::L1, 1.0, loss.dim());
}

/// Same weights, different base loss.
LossFamily rebase(const LossFamily& family, const Loss& base) {
  if (family.identity_weights()) return LossFamily::identity(base, family.size());
  std::vector<Matrix> weights;
  for (int t = 0; t < family.size(); ++t) weights.push_back(family.weight(t));
  return LossFamily::weighted(base, std::move(weights));
}

void fill_from_admm(SolveReport& rep, const AdmmResult& r) {
  rep.iterations = r.iterations;
  rep.primal_residual = r.primal_residual;
  rep.dual_residual = r.dual_residual;
  rep.primal_tolerance = r.primal_tolerance;
  rep.dual_tolerance = r.dual_tolerance;
  rep.converged = r.converged;
  rep.monotone_checks = r.monotone_checks;
  rep.monotone_violations = r.monotone_violations;
  if (!r.converged) rep.warnings.push_back("ADMM reached the iteration limit before converging");
}

Vector solve_spd(const SparseMatrix& K, const Vector& rhs, std::vector<std::string>* warnings) {
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(K);
  if (ldlt.info() == Eigen::Success) {
    Vector z = ldlt.solve(rhs);
    if (z.allFinite()) return z;
  }
  warnings->push_back("normal equations are singular; returning a minimum-norm solution");
  const Matrix Kd(K);
  return Kd.completeOrthogonalDecomposition().solve(rhs);
}

/// Multistart local search for the nonconvex case, seeded from `starts`.
SubgradientResult multistart(const SubgradientOracle& f, const std::vector<Vector>& starts,
                             const SolverOptions& opts) {
  Rng rng(opts.seed);
  SubgradientResult best;
  best.value = std::numeric_limits<double>::infinity();
  auto run = [&](const Vector& z0) {
    SubgradientResult r = minimize_subgradient(f, z0, opts.max_iterations, 1e-10);
    best.iterations += r.iterations;
    if (r.value < best.value) {
      best.value = r.value;
      best.z = r.z;
    }
  };
  for (const auto& s : starts) run(s);
  const double spread = 1.0 + (best.z.size() ? best.z.lpNorm<Eigen::Infinity>() : 0.0);
  for (int k = 0; k < opts.restarts; ++k) {
    Vector z0 = best.z;
    for (Eigen::Index i = 0; i < z0.size(); ++i) z0[i] += spread * rng.normal();
    run(z0);
  }
  return best;
}

}  // namespace

double trajectory_objective(const ObjectiveSpec& obj, const Matrix& Z) {
  validate(obj);
  const LtvSystem& sys = obj.sys;
  if (Z.rows() != sys.n() || Z.cols() != sys.horizon()) {
    throw InvalidArgument("trajectory_objective: Z must be n x T");
  }
  double process = 0.0, output = 0.0;
  for (int t = 0; t + 1 < sys.horizon(); ++t) {
    process += obj.phi.eval(t, Z.col(t + 1) - sys.A(t) * Z.col(t));
  }
  for (int t = 0; t < sys.horizon(); ++t) {
    output += obj.psi.eval(t, obj.Y.col(t) - sys.C(t) * Z.col(t));
  }
  return obj.lambda * process + output;
}

double trajectory_objective_with_subgradient(const ObjectiveSpec& obj, const Vector& z,
                                             Vector* grad) {
  const LtvSystem& sys = obj.sys;
  const int n = sys.n(), T = sys.horizon();
  const Matrix Z = unvec(z, n, T);
  double value = 0.0;
  Matrix G = Matrix::Zero(n, T);
  for (int t = 0; t + 1 < T; ++t) {
    const Matrix W = obj.phi.weight(t);
    const Vector r = W * (Z.col(t + 1) - sys.A(t) * Z.col(t));
    value += obj.lambda * eval(obj.phi.base(), r);
    if (grad) {
      const Vector g = obj.lambda * (W.transpose() * subgradient(obj.phi.base(), r));
      G.col(t + 1) += g;
      G.col(t) -= sys.A(t).transpose() * g;
    }
  }
  for (int t = 0; t < T; ++t) {
    const Matrix V = obj.psi.weight(t);
    const Vector e = V * (obj.Y.col(t) - sys.C(t) * Z.col(t));
    value += eval(obj.psi.base(), e);
    if (grad) G.col(t) -= sys.C(t).transpose() * (V.transpose() * subgradient(obj.psi.base(), e));
  }
  if (grad) *grad = vec(G);
  return value;
}

SolveReport solve_trajectory(const ObjectiveSpec& obj, const SolverOptions& opts) {
  validate(obj);
  const LtvSystem& sys = obj.sys;
  const int n = sys.n(), T = sys.horizon();
  const Eigen::Index N = static_cast<Eigen::Index>(n) * T;

  SolveReport rep;
  const bool observable = is_observable(sys);
  if (!observable) {
    rep.warnings.push_back(
        "system is not observable on the horizon; the minimizer need not be unique");
  }
  const Loss& phi = obj.phi.base();
  const Loss& psi = obj.psi.base();
  Matrix Qphi, Qpsi;
  const bool phi_quad = phi.quadratic_form(&Qphi);
  const bool psi_quad = psi.quadratic_form(&Qpsi);
  const bool convex = phi.is_convex() && psi.is_convex();

  SolverMethod method = opts.method;
  if (method == SolverMethod::Auto) {
    method = !convex ? SolverMethod::Subgradient
                     : (phi_quad && psi_quad ? SolverMethod::ClosedForm : SolverMethod::Admm);
  }
  if (method == SolverMethod::ClosedForm && !(phi_quad && psi_quad)) {
    throw UnsupportedOperation("closed-form solve needs quadratic phi and psi");
  }
  if (method == SolverMethod::Admm && !convex) {
    throw UnsupportedOperation("ADMM needs convex phi and psi");
  }
  if (method != SolverMethod::ClosedForm && method != SolverMethod::Admm &&
      method != SolverMethod::Subgradient) {
    throw InvalidArgument(std::string("solve_trajectory: unsupported method ") + to_string(method));
  }
  rep.method = method;

  const SparseMatrix G = process_operator(obj);
  Vector h;
  const SparseMatrix H = output_operator(obj, &h);
  Vector z;

  if (method == SolverMethod::Subgradient) {
    rep.certified = false;
    rep.warnings.push_back("nonconvex loss: local subgradient search with restarts, not certified");
    ObjectiveSpec surrogate{obj.sys, obj.Y, rebase(obj.phi, convex_surrogate(phi)),
                            rebase(obj.psi, convex_surrogate(psi)), obj.lambda};
    std::vector<Vector> starts{Vector::Zero(N)};
    if (observable) {
      SolverOptions sub = opts;
      sub.method = SolverMethod::Auto;
      sub.max_iterations = std::min(opts.max_iterations, 20000);
      starts.push_back(vec(solve_trajectory(surrogate, sub).solution));
    }
    const SubgradientOracle f = [&](const Vector& x, Vector* g) {
      return trajectory_objective_with_subgradient(obj, x, g);
    };
    const SubgradientResult r = multistart(f, starts, opts);
    z = r.z;
    rep.iterations = r.iterations;
    rep.converged = true;
  } else {
    SparseMatrix P(N, N);
    Vector q = Vector::Zero(N);
    if (phi_quad) P += 2.0 * obj.lambda * SparseMatrix(G.transpose() * block_diagonal(Qphi, T - 1) * G);
    if (psi_quad) {
      const SparseMatrix QH = block_diagonal(Qpsi, T) * H;
      P += 2.0 * SparseMatrix(H.transpose() * QH);
      q += 2.0 * (QH.transpose() * h);
    }
    if (!observable) P += 1e-10 * sparse_identity(N);
    if (method == SolverMethod::ClosedForm) {
      z = solve_spd(P, -q, &rep.warnings);
      rep.converged = true;
    } else {
      AdmmProblem pb;
      pb.P = P;
      pb.q = q;
      const Eigen::Index mg = phi_quad ? 0 : G.rows();
      const Eigen::Index mh = psi_quad ? 0 : H.rows();
      Triplets trip;
      if (!phi_quad) {
        for (int k = 0; k < G.outerSize(); ++k) {
          for (SparseMatrix::InnerIterator it(G, k); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
        }
      }
      if (!psi_quad) {
        for (int k = 0; k < H.outerSize(); ++k) {
          for (SparseMatrix::InnerIterator it(H, k); it; ++it) {
            trip.emplace_back(mg + it.row(), it.col(), it.value());
          }
        }
      }
      pb.L.resize(mg + mh, N);
      pb.L.setFromTriplets(trip.begin(), trip.end());
      pb.c = Vector::Zero(mg + mh);
      if (!psi_quad) pb.c.tail(mh) = h;
      if (!phi_quad) {
        for (int t = 0; t + 1 < T; ++t) pb.blocks.push_back({t * n, &phi, obj.lambda});
      }
      if (!psi_quad) {
        for (int t = 0; t < T; ++t) {
          pb.blocks.push_back({static_cast<int>(mg) + t * sys.ny(), &psi, 1.0});
        }
      }
      const AdmmResult r = solve_admm(pb, opts);
      z = r.z;
      fill_from_admm(rep, r);
    }
  }

  rep.solution = unvec(z, n, T);
  rep.objective_value = trajectory_objective(obj, rep.solution);
  rep.flatness = probe_flatness(
      [&](const Vector& x) { return trajectory_objective(obj, unvec(x, n, T)); }, z);
  rep.flat = rep.flatness <= 1e-12 * (1.0 + rep.objective_value);
  if (opts.verbosity > 0) {
    std::fprintf(stderr, "solve_trajectory: method=%s iterations=%d objective=%.10g\n",
                 to_string(rep.method), rep.iterations, rep.objective_value);
  }
  return rep;
}

double initial_state_objective(const LtvSystem& sys, const Matrix& Y, const LossFamily& psi,
                               VectorRef z) {
  if (Y.rows() != sys.ny() || Y.cols() != sys.horizon()) {
    throw InvalidArgument("initial_state_objective: Y must be ny x T");
  }
  if (z.size() != sys.n()) throw InvalidArgument("initial_state_objective: z has the wrong size");
  double total = 0.0;
  Vector x = z;
  for (int t = 0; t < sys.horizon(); ++t) {
    total += psi.eval(t, Y.col(t) - sys.C(t) * x);
    if (t + 1 < sys.horizon()) x = sys.A(t) * x;
  }
  return total;
}

SolveReport solve_initial_state(const LtvSystem& sys, const Matrix& Y, const LossFamily& psi,
                                const SolverOptions& opts) {
  const int n = sys.n(), ny = sys.ny(), T = sys.horizon();
  if (Y.rows() != ny || Y.cols() != T) throw InvalidArgument("solve_initial_state: Y must be ny x T");
  if (psi.dim() != ny || psi.size() < T) {
    throw InvalidArgument("solve_initial_state: psi family does not match the system");
  }
  SolveReport rep;
  if (!is_observable(sys)) {
    rep.warnings.push_back("system is not observable on the horizon; the minimizer need not be unique");
  }
  // Weighted maps R_t = V_t M_t and data d_t = V_t y_t; residual d - R z.
  const OutputMaps maps = output_maps(sys, false);
  const Eigen::Index m = static_cast<Eigen::Index>(T) * ny;
  Matrix R(m, n);
  Vector d(m);
  for (int t = 0; t < T; ++t) {
    const Matrix V = psi.weight(t);
    R.middleRows(static_cast<Eigen::Index>(t) * ny, ny) = V * maps.M[t];
    d.segment(static_cast<Eigen::Index>(t) * ny, ny) = V * Y.col(t);
  }
  const Loss& base = psi.base();
  Matrix Q;
  const bool quad = base.quadratic_form(&Q);
  const NormPower* np = std::get_if<NormPower>(&base.kind());
  const bool linf_poly = np && np->p == 1.0 && np->norm == Norm::Linf && ny > 1;

  SolverMethod method = opts.method;
  if (method == SolverMethod::Auto) {
    if (quad) {
      method = SolverMethod::ClosedForm;
    } else if (base.is_polyhedral() || linf_poly) {
      method = SolverMethod::Lp;
    } else if (base.is_l0()) {
      method = SolverMethod::Exhaustive;
    } else if (base.is_convex()) {
      method = SolverMethod::Admm;
    } else {
      method = SolverMethod::Subgradient;
    }
  }
  rep.method = method;
  Vector z = Vector::Zero(n);

  switch (method) {
    case SolverMethod::ClosedForm: {
      if (!quad) throw UnsupportedOperation("closed-form solve needs a quadratic psi");
      Matrix K = Matrix::Zero(n, n);
      Vector rhs = Vector::Zero(n);
      for (int t = 0; t < T; ++t) {
        const auto Rt = R.middleRows(static_cast<Eigen::Index>(t) * ny, ny);
        const auto dt = d.segment(static_cast<Eigen::Index>(t) * ny, ny);
        K += Rt.transpose() * Q * Rt;
        rhs += Rt.transpose() * Q * dt;
      }
      Eigen::LDLT<Matrix> ldlt(K);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive() && numerical_rank(K) == n) {
        z = ldlt.solve(rhs);
      } else {
        rep.warnings.push_back("normal equations are singular; returning a minimum-norm solution");
        z = K.completeOrthogonalDecomposition().solve(rhs);
      }
      rep.converged = true;
      break;
    }
    case SolverMethod::Lp: {
      LinearProgram lp;
      if (!linf_poly) {
        if (!base.is_polyhedral()) throw UnsupportedOperation("LP path needs a polyhedral psi");
        // R z + a - b = d, minimize sum(a + b).
        const Eigen::Index nv = n + 2 * m;
        lp.c = Vector::Zero(nv);
        lp.c.tail(2 * m).setOnes();
        lp.A_eq = Matrix::Zero(m, nv);
        lp.A_eq.leftCols(n) = R;
        lp.A_eq.middleCols(n, m) = Matrix::Identity(m, m);
        lp.A_eq.rightCols(m) = -Matrix::Identity(m, m);
        lp.b_eq = d;
        lp.A_ub.resize(0, nv);
        lp.b_ub.resize(0);
        lp.free.assign(nv, false);
      } else {
        // +-(d_i - R_i z) <= sigma_t, minimize sum(sigma).
        const Eigen::Index nv = n + T;
        lp.c = Vector::Zero(nv);
        lp.c.tail(T).setOnes();
        lp.A_eq.resize(0, nv);
        lp.b_eq.resize(0);
        lp.A_ub = Matrix::Zero(2 * m, nv);
        lp.b_ub.resize(2 * m);
        for (Eigen::Index i = 0; i < m; ++i) {
          const Eigen::Index t = i / ny;
          lp.A_ub.row(2 * i).head(n) = R.row(i);
          lp.A_ub(2 * i, n + t) = -1.0;
          lp.b_ub[2 * i] = d[i];
          lp.A_ub.row(2 * i + 1).head(n) = -R.row(i);
          lp.A_ub(2 * i + 1, n + t) = -1.0;
          lp.b_ub[2 * i + 1] = -d[i];
        }
        lp.free.assign(nv, false);
      }
      for (int j = 0; j < n; ++j) lp.free[j] = true;
      const LpResult r = solve_lp(lp);
      if (r.status != LpStatus::Optimal) {
        throw PreconditionViolation(std::string("solve_initial_state: simplex ended with status ") +
                                    to_string(r.status));
      }
      z = r.x.head(n);
      rep.iterations = r.iterations;
      rep.converged = true;
      break;
    }
    case SolverMethod::Exhaustive: {
      // Some minimizer zeroes n independent residual rows (or is z = 0).
      if (n > 4 || (n > 1 && std::pow(static_cast<double>(m), n) > 1e9)) {
        throw UnsupportedOperation("exhaustive l0 search is limited to small problems");
      }
      double best = initial_state_objective(sys, Y, psi, z);
      std::vector<int> idx(n);
      for (int i = 0; i < n; ++i) idx[i] = i;
      Matrix Rs(n, n);
      Vector ds(n);
      while (m >= n) {
        for (int i = 0; i < n; ++i) {
          Rs.row(i) = R.row(idx[i]);
          ds[i] = d[idx[i]];
        }
        Eigen::FullPivLU<Matrix> lu(Rs);
        if (lu.isInvertible()) {
          const Vector cand = lu.solve(ds);
          const double v = initial_state_objective(sys, Y, psi, cand);
          if (v < best) {
            best = v;
            z = cand;
          }
        }
        ++rep.iterations;
        int k = n - 1;
        while (k >= 0 && idx[k] == static_cast<int>(m) - n + k) --k;
        if (k < 0) break;
        ++idx[k];
        for (int i = k + 1; i < n; ++i) idx[i] = idx[i - 1] + 1;
      }
      rep.converged = true;
      break;
    }
    case SolverMethod::Admm: {
      if (!base.is_convex()) throw UnsupportedOperation("ADMM needs a convex psi");
      AdmmProblem pb;
      pb.P = SparseMatrix(n, n);
      if (numerical_rank(R) < n) pb.P = 1e-10 * sparse_identity(n);
      pb.q = Vector::Zero(n);
      pb.L = (-R).sparseView();
      pb.c = d;
      for (int t = 0; t < T; ++t) pb.blocks.push_back({t * ny, &base, 1.0});
      const AdmmResult r = solve_admm(pb, opts);
      z = r.z;
      fill_from_admm(rep, r);
      break;
    }
    case SolverMethod::Subgradient: {
      rep.certified = false;
      rep.warnings.push_back("nonconvex loss: local subgradient search with restarts, not certified");
      std::vector<Vector> starts{Vector::Zero(n)};
      if (numerical_rank(R) == n) {
        SolverOptions sub = opts;
        sub.method = SolverMethod::Auto;
        starts.push_back(
            solve_initial_state(sys, Y, rebase(psi, convex_surrogate(base)), sub)
                .solution.col(0));
        starts.push_back(R.colPivHouseholderQr().solve(d));
      }
      const SubgradientOracle f = [&](const Vector& x, Vector* g) {
        const Vector e = d - R * x;
        double v = 0.0;
        if (g) g->setZero(n);
        for (int t = 0; t < T; ++t) {
          const auto et = e.segment(static_cast<Eigen::Index>(t) * ny, ny);
          v += eval(base, et);
          if (g) {
            *g -= R.middleRows(static_cast<Eigen::Index>(t) * ny, ny).transpose() *
                  subgradient(base, et);
          }
        }
        return v;
      };
      const SubgradientResult r = multistart(f, starts, opts);
      z = r.z;
      rep.iterations = r.iterations;
      rep.converged = true;
      break;
    }
    default:
      throw InvalidArgument(std::string("solve_initial_state: unsupported method ") +
                            to_string(method));
  }

  rep.solution = z;
  rep.objective_value = initial_state_objective(sys, Y, psi, z);
  rep.flatness = probe_flatness(
      [&](const Vector& x) { return initial_state_objective(sys, Y, psi, x); }, z);
  rep.flat = rep.flatness <= 1e-12 * (1.0 + rep.objective_value);
  return rep;
}

SubgradientResult minimize_subgradient(const SubgradientOracle& f, const Vector& z0,
                                       int max_iterations, double tolerance) {
  SubgradientResult best;
  Vector x = z0, g;
  double fx = f(x, &g);
  best.z = x;
  best.value = fx;
  double f_ref = fx;
  double delta = std::max(0.5 * fx, 1e-12);
  double budget = 1.0 + x.norm();
  double path = 0.0;
  int k = 0;
  for (; k < max_iterations; ++k) {
    const double gn2 = g.squaredNorm();
    if (gn2 == 0.0) break;
    const double level = std::max(f_ref - delta, 0.0);
    const double step = (fx - level) / gn2;
    x -= step * g;
    path += step * std::sqrt(gn2);
    fx = f(x, &g);
    if (fx < best.value) {
      best.value = fx;
      best.z = x;
    }
    if (best.value <= f_ref - 0.5 * delta) {
      f_ref = best.value;
      path = 0.0;
    } else if (path > budget) {
      delta *= 0.5;
      budget *= std::sqrt(0.5);
      path = 0.0;
      x = best.z;
      fx = f(x, &g);
      f_ref = best.value;
    }
    if (delta <= tolerance * (1.0 + best.value) || best.value == 0.0) break;
  }
  best.iterations = k;
  return best;
}

}  // namespace resest
