#include "fem/solvers.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace rivet::fem {

void SpdFactor::factorize(const SparseMatrix& K) {
  if (K.rows() != K.cols()) throw Error(ErrorKind::Solver, "matrix is not square");
  SparseMatrix Kc = K;
  Kc.makeCompressed();
  const auto* op = Kc.outerIndexPtr();
  const auto* ip = Kc.innerIndexPtr();
  const bool same = analyzed_ && outer_.size() == static_cast<size_t>(Kc.outerSize() + 1) &&
                    inner_.size() == static_cast<size_t>(Kc.nonZeros()) &&
                    std::equal(outer_.begin(), outer_.end(), op) &&
                    std::equal(inner_.begin(), inner_.end(), ip);
  if (!same) {
    llt_.analyzePattern(Kc);
    outer_.assign(op, op + Kc.outerSize() + 1);
    inner_.assign(ip, ip + Kc.nonZeros());
    analyzed_ = true;
  }
  llt_.factorize(Kc);
  if (llt_.info() != Eigen::Success) {
    throw Error(ErrorKind::Solver, "sparse Cholesky factorization failed: matrix is not SPD");
  }
}

Eigen::VectorXd SpdFactor::solve(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd x = llt_.solve(rhs);
  if (!x.allFinite()) throw Error(ErrorKind::Solver, "sparse solve produced non-finite values");
  return x;
}

Eigen::VectorXd solve_sparse_spd(const SparseMatrix& K, const Eigen::VectorXd& rhs) {
  if (rhs.size() != K.rows()) throw Error(ErrorKind::InvalidArgument, "rhs size mismatch");
  SpdFactor f;
  f.factorize(K);
  Eigen::VectorXd x = f.solve(rhs);
  const double target = 1e-10 * rhs.norm();
  for (int k = 0; k < 5; ++k) {
    const Eigen::VectorXd r = rhs - K * x;
    if (r.norm() <= target) return x;
    x += f.solve(r);
  }
  const double res = (rhs - K * x).norm();
  if (res > target) {
    throw Error(ErrorKind::Solver,
                fmt::format("sparse solve residual {:.3e} above 1e-10 |rhs| = {:.3e}", res, target));
  }
  return x;
}

Eigen::VectorXd sherman_morrison_solve(const SpdFactor& factor, double b, const Eigen::VectorXd& fz,
                                       const Eigen::VectorXd& rz) {
  Eigen::VectorXd x = factor.solve(rz);
  if (b == 0.0 || fz.size() == 0 || fz.squaredNorm() == 0.0) return x;
  const Eigen::VectorXd y = factor.solve(fz);
  const double denom = 1.0 + b * fz.dot(y);
  if (std::abs(denom) < 1e-12) {
    throw Error(ErrorKind::Solver,
                fmt::format("rank-1 update is singular (denominator {:.3e})", denom));
  }
  x -= (b * fz.dot(x) / denom) * y;
  return x;
}

Eigen::VectorXd sherman_morrison_solve(const SparseMatrix& Ksp, double b, const Eigen::VectorXd& fz,
                                       const Eigen::VectorXd& rz) {
  if (fz.size() != Ksp.rows() || rz.size() != Ksp.rows()) {
    throw Error(ErrorKind::InvalidArgument, "sherman-morrison: size mismatch");
  }
  SpdFactor f;
  f.factorize(Ksp);
  return sherman_morrison_solve(f, b, fz, rz);
}

namespace {

// Backtracking on the energy. Near convergence the decrease drowns in
// round-off, so a small slack relative to |E| is allowed. When no trial
// passes, the trial with the lowest energy is taken.
template <class Energy>
double line_search(Energy&& energy, double e0, double slope) {
  const double slack = 1e-14 * (1.0 + std::abs(e0));
  double s = 1.0, best_s = 1.0;
  double best_e = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 30; ++k) {
    const double e = energy(s);
    if (std::isfinite(e) && e <= e0 + 1e-4 * s * slope + slack) return s;
    if (e < best_e) {
      best_e = e;
      best_s = s;
    }
    s *= 0.5;
  }
  return best_s;
}

// Step along d for a convex objective given its directional derivative
// phi'(s), with phi'(0) < 0. The full step is kept while phi' stays
// negative; otherwise phi' = 0 is bracketed in (0, 1] and located with the
// Illinois variant of regula falsi.
template <class Derivative>
double derivative_search(Derivative&& dphi, double d0) {
  double b = 1.0, fb = dphi(b);
  while (!std::isfinite(fb) && b > 1e-12) fb = dphi(b *= 0.5);
  if (!std::isfinite(fb) || fb <= 0.0) return b;
  double a = 0.0, fa = d0;
  int side = 0;
  for (int k = 0; k < 60; ++k) {
    const double c = (a * fb - b * fa) / (fb - fa);
    const double fc = dphi(c);
    if (std::abs(fc) <= 1e-3 * std::abs(d0) || b - a <= 1e-14) return c;
    if (fc < 0.0) {
      a = c;
      fa = fc;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      b = c;
      fb = fc;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
  }
  return a > 0.0 ? a : 0.5 * b;
}

bool stalled(const std::vector<double>& h, double tol) {
  const size_t n = h.size();
  return n >= 2 && h[n - 1] <= tol && h[n - 1] > 0.5 * h[n - 2];
}

}  // namespace

NewtonReport newton_solve_u(const PhaseFieldModel& model, double t, Eigen::VectorXd& u,
                            const Eigen::VectorXd& z, const NewtonOptions& opts) {
  model.apply_dirichlet(t, u);
  NewtonReport rep;
  SpdFactor factor;
  const Eigen::VectorXd f_ext = model.external_force(t);
  double tol = 0.0;
  for (int it = 0;; ++it) {
    const Eigen::VectorXd f_int = model.internal_force(u, z);
    Eigen::VectorXd r = f_int - f_ext;
    for (int i = 0; i < model.num_u_dofs(); ++i)
      if (model.fixed_dofs()[i]) r[i] = 0.0;
    const double rn = r.norm();
    rep.history.push_back(rn);
    if (!std::isfinite(rn)) {
      throw NonConvergenceError("displacement Newton produced a non-finite residual", rep.history);
    }
    const double floor = std::max(opts.abs_tol, opts.scale_tol * (f_int.norm() + f_ext.norm()));
    if (it == 0) tol = std::max(opts.rel_tol * rn, floor);
    tol = std::max(tol, floor);
    if (rn <= tol || stalled(rep.history, opts.stall_tol * (f_int.norm() + f_ext.norm()))) {
      return rep;
    }
    if (it >= opts.max_iters) {
      throw NonConvergenceError(
          fmt::format("displacement Newton did not converge in {} iterations, residual {:.3e}",
                      opts.max_iters, rn),
          rep.history);
    }
    factor.factorize(model.tangent_uu(u, z));
    const Eigen::VectorXd d = -factor.solve(r);
    const double e0 = model.total_energy(t, u, z);
    const double s = line_search(
        [&](double s) { return model.total_energy(t, u + s * d, z); }, e0, r.dot(d));
    u += s * d;
    rep.iters = it + 1;
  }
}

NewtonReport newton_solve_z(const PhaseFieldModel& model, const ZProblem& zp, Eigen::VectorXd& z,
                            const auglag::State& al, const NewtonOptions& opts) {
  NewtonReport rep;
  SpdFactor factor;
  const MaterialParams& mp = model.material();
  const double scale = mp.gc / mp.l * model.lumped_mass().norm();
  double tol = 0.0;
  for (int it = 0;; ++it) {
    const ZEvaluation ev = model.residual_z(zp, z, al);
    const double rn = ev.r.norm();
    rep.history.push_back(rn);
    if (!std::isfinite(rn)) {
      throw NonConvergenceError("phase-field Newton produced a non-finite residual", rep.history);
    }
    const double floor = std::max(opts.abs_tol, opts.scale_tol * scale);
    if (it == 0) tol = std::max(opts.rel_tol * rn, floor);
    if (rn <= tol || stalled(rep.history, opts.stall_tol * scale)) return rep;
    if (it >= opts.max_iters) {
      throw NonConvergenceError(
          fmt::format("phase-field Newton did not converge in {} iterations, residual {:.3e}",
                      opts.max_iters, rn),
          rep.history);
    }
    factor.factorize(model.Kzz_sparse(zp, z, al, ev.nq));
    const Eigen::VectorXd d = -sherman_morrison_solve(factor, ev.nq.b, ev.nq.fz, ev.r);
    const double e0 = model.augmented_energy_z(zp, z, al);
    const double slope = ev.r.dot(d);
    // The remaining decrease is below what the energy resolves and the
    // correction is negligible: z minimizes to round-off.
    if (-slope <= opts.decrement_tol * (1.0 + std::abs(e0)) && d.lpNorm<Eigen::Infinity>() <= opts.step_tol) {
      return rep;
    }
    const double s = derivative_search(
        [&](double s) { return model.residual_z(zp, z + s * d, al).r.dot(d); }, slope);
    z += s * d;
    rep.iters = it + 1;
  }
}

double global_penalty_scale(const PhaseFieldModel& model, const norms::NormSpec& norm) {
  const MaterialParams& mp = model.material();
  const double gl = mp.gc / mp.l;
  if (norm.kind == norms::NormSpec::Kind::H1) return gl;
  return gl * std::pow(model.disc().area(), 1.0 - 2.0 / norm.p);
}

AugLagReport solve_z_auglag(const PhaseFieldModel& model, const ZProblem& zp, Eigen::VectorXd& z,
                            const auglag::Config& cfg, const NewtonOptions& opts) {
  cfg.validate();
  const int n = model.num_nodes();
  const Eigen::VectorXd& kdiag = model.z_stiffness_diagonal();
  const double gscale = global_penalty_scale(model, zp.norm);

  AugLagReport rep;
  auglag::State& al = rep.state;
  al = auglag::State::fresh(n, cfg);
  al.alpha1 = cfg.alpha1_init * kdiag;
  al.alpha2 = cfg.alpha2_init * gscale;

  auglag::Config cap1 = cfg, cap2 = cfg;
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::VectorXd prev_v1 = Eigen::VectorXd::Constant(n, inf);
  double prev_v2 = inf;
  const double tol_global = std::min(cfg.kkt_tol_feas_global, 1e-10 * zp.rho);

  for (int k = 1; k <= cfg.max_outer; ++k) {
    al.outer_iter = k;
    const NewtonReport nr = newton_solve_z(model, zp, z, al, opts);
    rep.outer_iters = k;
    rep.newton_max = std::max(rep.newton_max, nr.iters);

    const Eigen::VectorXd c = z - zp.z_prev;
    const double g = norms::norm_value(c, model.disc(), zp.norm) - zp.rho;
    // Violation |max(c, -lambda/alpha)| = |lambda_new - lambda_old| / alpha
    // covers both feasibility and complementarity.
    Eigen::VectorXd v1(n);
    for (int a = 0; a < n; ++a) {
      const double next = auglag::hestenes_powell(al.lambda1[a], al.alpha1[a], c[a]);
      v1[a] = std::abs(next - al.lambda1[a]) / al.alpha1[a];
      al.lambda1[a] = next;
    }
    const double next2 = auglag::hestenes_powell(al.lambda2, al.alpha2, g);
    const double v2 = std::abs(next2 - al.lambda2) / al.alpha2;
    al.lambda2 = next2;

    const Eigen::VectorXd gv = Eigen::VectorXd::Constant(1, g);
    const Eigen::VectorXd l2 = Eigen::VectorXd::Constant(1, al.lambda2);
    if (auglag::kkt_satisfied(c, al.lambda1, cfg.kkt_tol_feas_nodal, cfg.kkt_tol_comp) &&
        auglag::kkt_satisfied(gv, l2, tol_global, cfg.kkt_tol_comp)) {
      return rep;
    }

    for (int a = 0; a < n; ++a) {
      cap1.alpha_max = cfg.alpha_max * kdiag[a];
      al.alpha1[a] = auglag::penalty_update(al.alpha1[a], v1[a], prev_v1[a], cap1);
      prev_v1[a] = v1[a];
    }
    cap2.alpha_max = cfg.alpha_max * gscale;
    al.alpha2 = auglag::penalty_update(al.alpha2, v2, prev_v2, cap2);
    prev_v2 = v2;
  }
  const Eigen::VectorXd c = z - zp.z_prev;
  throw NonConvergenceError(
      fmt::format("augmented Lagrangian did not reach a KKT point in {} outer iterations "
                  "(max nodal violation {:.3e})",
                  cfg.max_outer, std::max(0.0, c.maxCoeff())),
      {std::max(0.0, c.maxCoeff())});
}

}  // namespace rivet::fem
