#include "toy/toy.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace rivet::toy {

namespace {

double sq(double x) { return x * x; }

// Grid argmin of f over [lo, hi] with n intervals, then Brent on the bracketing cell.
template <class F>
double grid_argmin(F&& f, double lo, double hi, int n) {
  if (hi <= lo) return hi;
  const double h = (hi - lo) / n;
  int best = 0;
  double fbest = f(lo);
  for (int i = 1; i <= n; ++i) {
    const double v = f(lo + i * h);
    if (v < fbest) {
      fbest = v;
      best = i;
    }
  }
  const double a = lo + std::max(0, best - 1) * h;
  const double b = std::min(hi, lo + std::min(n, best + 1) * h);
  const auto [x, fx] = boost::math::tools::brent_find_minima(f, a, b, 52);
  return fx <= fbest ? x : lo + best * h;
}

}  // namespace

double toy_energy(double t, double u1, double u2, double z, double load) {
  return 58.0 * sq(z + 14.0) + sq(u1) * (60.0 * sq(z + 2.0) + 76.0) +
         u1 * (-4.0 * sq(z - 16.0) - 8.0) + sq(u2) * (15.0 * sq(z - 33.0) + 100.0) +
         25.0 * u2 * sq(z - 20.0) - load * t * u2;
}

UMin toy_u_min(double t, double z, double load) {
  return {(4.0 * sq(z - 16.0) + 8.0) / (2.0 * (60.0 * sq(z + 2.0) + 76.0)),
          (load * t - 25.0 * sq(z - 20.0)) / (2.0 * (15.0 * sq(z - 33.0) + 100.0))};
}

UMin toy_energy_du(double t, double u1, double u2, double z, double load) {
  return {2.0 * u1 * (60.0 * sq(z + 2.0) + 76.0) - 4.0 * sq(z - 16.0) - 8.0,
          2.0 * u2 * (15.0 * sq(z - 33.0) + 100.0) + 25.0 * sq(z - 20.0) - load * t};
}

ZQuadratic toy_energy_in_z(double t, double u1, double u2, double load) {
  ZQuadratic q;
  q.a = 58.0 + 60.0 * sq(u1) - 4.0 * u1 + 15.0 * sq(u2) + 25.0 * u2;
  q.b = 1624.0 + 240.0 * sq(u1) + 128.0 * u1 - 990.0 * sq(u2) - 1000.0 * u2;
  q.c = toy_energy(t, u1, u2, 0.0, load);
  return q;
}

double toy_z_min(double t, double u1, double u2, double lo, double hi, double load) {
  return std::clamp(toy_energy_in_z(t, u1, u2, load).vertex(), lo, hi);
}

double reduced_energy(double t, double z, double load) {
  const UMin u = toy_u_min(t, z, load);
  return toy_energy(t, u.u1, u.u2, z, load);
}

double reduced_energy_dz(double t, double z, double load) {
  const double h = 1e-6 * std::max(1.0, std::abs(z));
  return (reduced_energy(t, z + h, load) - reduced_energy(t, z - h, load)) / (2.0 * h);
}

double reduced_energy_dz_envelope(double t, double z, double load) {
  const UMin u = toy_u_min(t, z, load);
  return 116.0 * (z + 14.0) + 120.0 * sq(u.u1) * (z + 2.0) - 8.0 * u.u1 * (z - 16.0) +
         30.0 * sq(u.u2) * (z - 33.0) + 50.0 * u.u2 * (z - 20.0);
}

StableSetMap stable_set_scan(double t_lo, double t_hi, std::size_t nt, double z_lo, double z_hi,
                             std::size_t nz, double load) {
  if (nt < 2 || nz < 2 || !(t_hi > t_lo) || !(z_hi > z_lo)) {
    throw Error(ErrorKind::InvalidArgument, "stable_set_scan: need a non-empty grid");
  }
  StableSetMap map;
  map.dt = (t_hi - t_lo) / static_cast<double>(nt - 1);
  map.dz = (z_hi - z_lo) / static_cast<double>(nz - 1);
  map.t.resize(nt);
  map.z.resize(nz);
  for (std::size_t i = 0; i < nt; ++i) map.t[i] = t_lo + map.dt * static_cast<double>(i);
  for (std::size_t k = 0; k < nz; ++k) map.z[k] = z_lo + map.dz * static_cast<double>(k);
  map.flags.resize(nt * nz);
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t k = 0; k < nz; ++k) {
      map.flags[i * nz + k] = locally_stable(map.t[i], map.z[k], 0.0, load) ? 1 : 0;
    }
  }
  return map;
}

double nearest_stable_below(double t, double z, double h, double load) {
  if (locally_stable(t, z, 0.0, load)) return z;
  double a = z;
  // F_red is dominated by 58(z+14)^2 for very negative z, so the walk terminates.
  while (!locally_stable(t, a - h, 0.0, load)) a -= h;
  double lo = a - h;  // stable
  double hi = a;      // unstable
  for (int i = 0; i < 80 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++i) {
    const double m = 0.5 * (lo + hi);
    (locally_stable(t, m, 0.0, load) ? lo : hi) = m;
  }
  return lo;
}

ToyTrajectory run_toy_am(double z0, double dt, int n_am, double t_end, double load) {
  if (!(dt > 0.0) || n_am < 1) throw Error(ErrorKind::InvalidArgument, "run_toy_am: dt, n_am");
  ToyTrajectory out;
  double z = z0;
  for (int j = 0;; ++j) {
    const double t = j * dt;
    if (t > t_end + 1e-12) break;
    const double zp = z;
    for (int k = 0; k < n_am; ++k) {
      const UMin u = toy_u_min(t, z, load);
      z = toy_z_min(t, u.u1, u.u2, -std::numeric_limits<double>::infinity(), zp, load);
    }
    const UMin u = toy_u_min(t, z, load);
    out.push_back({j, t, dt, z, std::abs(z - zp), u.u1, u.u2, reduced_energy(t, z, load)});
  }
  return out;
}

ToyTrajectory run_toy_em(double z0, double rho, double t_end, int n_am, double load) {
  if (!(rho > 0.0) || n_am < 1) throw Error(ErrorKind::InvalidArgument, "run_toy_em: rho, n_am");
  ToyTrajectory out;
  double z = z0;
  double t = 0.0;
  for (int j = 0; t <= t_end; ++j) {
    const double zp = z;
    for (int k = 0; k < n_am; ++k) {
      const UMin u = toy_u_min(t, z, load);
      z = toy_z_min(t, u.u1, u.u2, zp - rho, zp, load);
    }
    const double dz = std::min(std::abs(z - zp), rho);
    const UMin u = toy_u_min(t, z, load);
    out.push_back({j, t, rho - dz, z, dz, u.u1, u.u2, reduced_energy(t, z, load)});
    t += rho - dz;
  }
  return out;
}

double global_z_min(double t, double z_max, const GlobalSearch& search, double load) {
  const double hi = std::min(search.hi, z_max);
  if (hi <= search.lo) return hi;
  auto f = [&](double z) { return reduced_energy(t, z, load); };
  const int n = std::max(2, static_cast<int>(std::lround(search.points * (hi - search.lo) /
                                                         (search.hi - search.lo))));
  return grid_argmin(f, search.lo, hi, n);
}

ToyTrajectory run_toy_global(double z0, double dt, double t_end, const GlobalSearch& search,
                             double load) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "run_toy_global: dt");
  ToyTrajectory out;
  double z = z0;
  for (int j = 0;; ++j) {
    const double t = j * dt;
    if (t > t_end + 1e-12) break;
    const double zp = z;
    const double cand = global_z_min(t, zp, search, load);
    if (reduced_energy(t, cand, load) < reduced_energy(t, zp, load)) z = std::min(cand, zp);
    const UMin u = toy_u_min(t, z, load);
    out.push_back({j, t, dt, z, std::abs(z - zp), u.u1, u.u2, reduced_energy(t, z, load)});
  }
  return out;
}

ToyTrajectory viscous_oracle(double z0, double epsilon, double dt, double t_end, double load) {
  if (!(epsilon > 0.0) || !(dt > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "viscous_oracle: epsilon and dt must be positive");
  }
  const double c = epsilon / dt;
  const double h = 1e-3;
  ToyTrajectory out;
  double z = z0;
  for (int j = 0;; ++j) {
    const double t = j * dt;
    if (t > t_end + 1e-12) break;
    const double zp = z;
    auto dG = [&](double x) { return reduced_energy_dz(t, x, load) + c * (x - zp); };
    if (dG(zp) > 0.0) {
      double a = zp;
      while (dG(a - h) > 0.0) a -= h;
      auto tol = [](double lo, double hi) { return hi - lo <= 1e-13 * std::max(1.0, std::abs(lo)); };
      const auto [lo, hi] = boost::math::tools::bisect(dG, a - h, a, tol);
      z = 0.5 * (lo + hi);
    }
    const UMin u = toy_u_min(t, z, load);
    out.push_back({j, t, dt, z, std::abs(z - zp), u.u1, u.u2, reduced_energy(t, z, load)});
  }
  return out;
}

AugLagZResult toy_z_step_auglag(double t, double u1, double u2, double z_prev, double rho,
                                const auglag::Config& cfg, double load) {
  cfg.validate();
  const ZQuadratic q = toy_energy_in_z(t, u1, u2, load);
  AugLagZResult r;
  double a1 = cfg.alpha1_init;
  double a2 = cfg.alpha2_init;
  double l1 = 0.0;
  double l2 = 0.0;
  double viol1_prev = std::numeric_limits<double>::infinity();
  double viol2_prev = std::numeric_limits<double>::infinity();
  double z = z_prev;

  for (int k = 1; k <= cfg.max_outer; ++k) {
    r.outer_iters = k;
    // The augmented objective is convex with a monotone derivative; safeguard
    // Newton with a bisection bracket.
    auto dphi = [&](double x, double* d2) {
      const auto t1 = auglag::nodal_term(x - z_prev, l1, a1);
      const auto t2 = auglag::global_term((z_prev - x) - rho, l2, a2);
      if (d2) *d2 = 2.0 * q.a + t1.d2 + t2.d2;
      return 2.0 * q.a * x + q.b + t1.d1 - t2.d1;
    };
    double lo = z_prev - rho - 1.0;
    double hi = z_prev + 1.0;
    while (dphi(lo, nullptr) > 0.0) lo -= 2.0 * (hi - lo);
    while (dphi(hi, nullptr) < 0.0) hi += 2.0 * (hi - lo);
    const double scale = std::abs(q.b) + 2.0 * q.a * std::abs(z_prev) + 1.0;
    bool done = false;
    for (int it = 0; it < 100; ++it) {
      double d2 = 0.0;
      const double g = dphi(z, &d2);
      ++r.newton_iters;
      if (std::abs(g) <= 1e-13 * scale) {
        done = true;
        break;
      }
      (g > 0.0 ? hi : lo) = z;
      double zn = z - g / d2;
      if (!(zn > lo && zn < hi)) zn = 0.5 * (lo + hi);
      z = zn;
    }
    if (!done) throw NonConvergenceError("toy_z_step_auglag: inner Newton stalled", {});

    const double c1 = z - z_prev;
    const double c2 = (z_prev - z) - rho;
    l1 = auglag::hestenes_powell(l1, a1, c1);
    l2 = auglag::hestenes_powell(l2, a2, c2);
    const bool ok1 = c1 <= cfg.kkt_tol_feas_nodal && std::abs(l1 * c1) <= cfg.kkt_tol_comp;
    const bool ok2 = c2 <= cfg.kkt_tol_feas_global && std::abs(l2 * c2) <= cfg.kkt_tol_comp;
    if (ok1 && ok2) {
      r.z = z;
      r.lambda1 = l1;
      r.lambda2 = l2;
      return r;
    }
    const double v1 = std::max(0.0, c1);
    const double v2 = std::max(0.0, c2);
    a1 = auglag::penalty_update(a1, v1, viol1_prev, cfg);
    a2 = auglag::penalty_update(a2, v2, viol2_prev, cfg);
    viol1_prev = v1;
    viol2_prev = v2;
  }
  throw NonConvergenceError("toy_z_step_auglag: KKT conditions not met within max_outer", {});
}

ToyProblem::ToyProblem(double load, ZSolver solver, auglag::Config al)
    : load_(load), solver_(solver), al_(al) {
  al_.validate();
}

em::SubSolveInfo ToyProblem::solve_equilibrium(double t, Eigen::VectorXd& u,
                                               const Eigen::VectorXd& z) {
  const UMin m = toy_u_min(t, z[0], load_);
  u.resize(2);
  u << m.u1, m.u2;
  return {1, 0};
}

em::SubSolveInfo ToyProblem::solve_internal(double t, const Eigen::VectorXd& u,
                                            Eigen::VectorXd& z, const Eigen::VectorXd& z_prev,
                                            double rho) {
  if (solver_ == ZSolver::ClampedVertex) {
    z[0] = toy_z_min(t, u[0], u[1], z_prev[0] - rho, z_prev[0], load_);
    return {1, 0};
  }
  const AugLagZResult r = toy_z_step_auglag(t, u[0], u[1], z_prev[0], rho, al_, load_);
  z[0] = r.z;
  return {r.newton_iters, r.outer_iters};
}

double ToyProblem::increment_norm(const Eigen::VectorXd& z, const Eigen::VectorXd& z_prev) const {
  return std::abs(z[0] - z_prev[0]);
}

double ToyProblem::equilibrium_residual(double t, const Eigen::VectorXd& u,
                                        const Eigen::VectorXd& z) const {
  const UMin g = toy_energy_du(t, u[0], u[1], z[0], load_);
  return std::hypot(g.u1, g.u2);
}

double ToyProblem::total_energy(double t, const Eigen::VectorXd& u,
                                const Eigen::VectorXd& z) const {
  return toy_energy(t, u[0], u[1], z[0], load_);
}

}  // namespace rivet::toy
