#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "toy/toy.hpp"

namespace rivet::toy {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

double snap_energy(double u, double F) {
  const double r = std::hypot(1.0 - u, 1.0);
  return (r - kSqrt2) * (r - kSqrt2) / kSqrt2 - F * u;
}

double snap_energy_du(double u, double F) {
  const double w = 1.0 - u;
  const double r = std::hypot(w, 1.0);
  return -kSqrt2 * w * (1.0 - kSqrt2 / r) - F;
}

double snap_energy_du2(double u) {
  const double r = std::hypot(1.0 - u, 1.0);
  return kSqrt2 - 2.0 / (r * r * r);
}

double snap_equilibrium(double F, double lo, double hi) {
  auto f = [F](double u) { return snap_energy_du(u, F); };
  if (f(lo) * f(hi) > 0.0) {
    throw Error(ErrorKind::InvalidArgument, "snap_equilibrium: no equilibrium in bracket");
  }
  boost::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (a + b);
}

Fold snap_fold() {
  // d2E = 0  <=>  r^3 = 2^{1/2}  <=>  (1-u)^2 = 2^{1/3} - 1
  const double u = 1.0 - std::sqrt(std::cbrt(2.0) - 1.0);
  return {u, snap_energy_du(u, 0.0)};
}

SnapTrajectory run_snap_em(const SnapSchedule& schedule, double rho, double u0, double t_end,
                           int max_newton) {
  if (!(rho > 0.0)) throw Error(ErrorKind::InvalidArgument, "run_snap_em: rho must be positive");
  const double tol = 1e-10;
  SnapTrajectory out;
  double u = u0;
  double t = 0.0;
  for (int j = 0; t <= t_end && j < 1000000; ++j) {
    const double F = schedule(t);
    const double lo = u - rho;
    const double hi = u + rho;
    double v = u;
    int it = 0;
    bool converged = false;
    while (it < max_newton) {
      ++it;
      const double g = snap_energy_du(v, F);
      const double h = snap_energy_du2(v);
      double vn = h > 0.0 ? v - g / h : (g < 0.0 ? hi : lo);
      v = std::clamp(vn, lo, hi);
      const double gn = snap_energy_du(v, F);
      if (std::abs(gn) < tol || (v >= hi && gn <= 0.0) || (v <= lo && gn >= 0.0)) {
        converged = true;
        break;
      }
    }
    const double du = std::min(std::abs(v - u), rho);
    out.push_back({j, t, rho - du, F, v, it, converged});
    u = v;
    t += rho - du;
  }
  return out;
}

SnapTrajectory run_snap_local(const SnapSchedule& schedule, double dt, double u0, double t_end,
                              int max_newton) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "run_snap_local: dt must be positive");
  const double tol = 1e-10;
  SnapTrajectory out;
  double u = u0;
  for (int j = 0;; ++j) {
    const double t = j * dt;
    if (t > t_end * (1.0 + 1e-12)) break;
    const double F = schedule(t);
    int it = 0;
    bool converged = false;
    while (true) {
      const double g = snap_energy_du(u, F);
      if (std::abs(g) < tol) {
        converged = true;
        break;
      }
      if (it >= max_newton || !std::isfinite(u)) break;
      const double h = snap_energy_du2(u);
      ++it;
      u -= g / h;
    }
    out.push_back({j, t, dt, F, u, it, converged});
  }
  return out;
}

SnapTrajectory run_snap_global(const SnapSchedule& schedule, double dt, [[maybe_unused]] double u0,
                               double t_end,
                               int points) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "run_snap_global: dt must be positive");
  const double lo = -1.0;
  const double hi = 3.0;
  const double h = (hi - lo) / points;
  SnapTrajectory out;
  for (int j = 0;; ++j) {
    const double t = j * dt;
    if (t > t_end * (1.0 + 1e-12)) break;
    const double F = schedule(t);
    auto f = [F](double x) { return snap_energy(x, F); };
    int best = 0;
    double fb = f(lo);
    for (int i = 1; i <= points; ++i) {
      const double v = f(lo + i * h);
      if (v < fb) {
        fb = v;
        best = i;
      }
    }
    const double a = lo + std::max(0, best - 1) * h;
    const double b = lo + std::min(points, best + 1) * h;
    const double u = boost::math::tools::brent_find_minima(f, a, b, 52).first;
    out.push_back({j, t, dt, F, u, 0, true});
  }
  return out;
}

std::vector<int> newton_iteration_census(const SnapTrajectory& trajectory) {
  std::vector<int> counts;
  counts.reserve(trajectory.size());
  for (const auto& r : trajectory) counts.push_back(r.newton_iters);
  return counts;
}

}  // namespace rivet::toy
