#pragma once

#include <cstdint>
#include <vector>

#include "auglag/auglag.hpp"
#include "emdriver/em_driver.hpp"

namespace rivet::toy {

/// Coefficient of the loading term -L*t*u2. Passing 0 gives the unloaded variant.
inline constexpr double kDefaultLoad = 2000.0;

double toy_energy(double t, double u1, double u2, double z, double load = kDefaultLoad);

struct UMin {
  double u1 = 0.0;
  double u2 = 0.0;
};

UMin toy_u_min(double t, double z, double load = kDefaultLoad);

/// Gradient of toy_energy in (u1, u2).
UMin toy_energy_du(double t, double u1, double u2, double z, double load = kDefaultLoad);

/// toy_energy is quadratic in z at fixed u: a z^2 + b z + c, with a > 0.
struct ZQuadratic {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double vertex() const { return -b / (2.0 * a); }
};
ZQuadratic toy_energy_in_z(double t, double u1, double u2, double load = kDefaultLoad);

/// argmin of the z-quadratic over [lo, hi].
double toy_z_min(double t, double u1, double u2, double lo, double hi,
                 double load = kDefaultLoad);

double reduced_energy(double t, double z, double load = kDefaultLoad);
/// Central difference with h = 1e-6 * max(1, |z|).
double reduced_energy_dz(double t, double z, double load = kDefaultLoad);
/// Partial derivative in z of toy_energy evaluated at the u-minimizer.
double reduced_energy_dz_envelope(double t, double z, double load = kDefaultLoad);

inline bool locally_stable(double t, double z, double tol = 0.0, double load = kDefaultLoad) {
  return reduced_energy_dz(t, z, load) <= tol;
}

struct StableSetMap {
  std::vector<double> t;
  std::vector<double> z;
  std::vector<std::uint8_t> flags;  ///< row-major, t index outer
  double dt = 0.0;
  double dz = 0.0;

  bool stable(std::size_t it, std::size_t iz) const { return flags[it * z.size() + iz] != 0; }
};

StableSetMap stable_set_scan(double t_lo, double t_hi, std::size_t nt, double z_lo, double z_hi,
                             std::size_t nz, double load = kDefaultLoad);

/// Walk down from z in increments of h until the first locally stable state,
/// then bisect the boundary. Returns z itself if it is already stable.
double nearest_stable_below(double t, double z, double h = 1e-3, double load = kDefaultLoad);

struct ToyRecord {
  int step = 0;
  double t = 0.0;
  double dt = 0.0;
  double z = 0.0;
  double dz = 0.0;  ///< |z_j - z_{j-1}|
  double u1 = 0.0;
  double u2 = 0.0;
  double f_red = 0.0;
};
using ToyTrajectory = std::vector<ToyRecord>;

ToyTrajectory run_toy_am(double z0, double dt, int n_am, double t_end,
                         double load = kDefaultLoad);
ToyTrajectory run_toy_em(double z0, double rho, double t_end, int n_am,
                         double load = kDefaultLoad);

struct GlobalSearch {
  double lo = -30.0;
  double hi = 40.0;
  int points = 100000;
};

/// argmin of F_red(t, .) on [search.lo, min(search.hi, z_max)] by uniform grid and Brent polish.
double global_z_min(double t, double z_max, const GlobalSearch& search = {},
                    double load = kDefaultLoad);

ToyTrajectory run_toy_global(double z0, double dt, double t_end, const GlobalSearch& search = {},
                             double load = kDefaultLoad);

/// Implicit Euler for 0 in dF_red + dI_{v<=0} + eps*v: each step descends from
/// z_prev to the first root of dF_red(t, z) + (eps/dt)(z - z_prev).
ToyTrajectory viscous_oracle(double z0, double epsilon, double dt, double t_end,
                             double load = kDefaultLoad);

/// One constrained z-step through the augmented-Lagrangian machinery:
/// minimize the z-quadratic subject to z <= z_prev and (z_prev - z) - rho <= 0.
struct AugLagZResult {
  double z = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  int outer_iters = 0;
  int newton_iters = 0;
};
AugLagZResult toy_z_step_auglag(double t, double u1, double u2, double z_prev, double rho,
                                const auglag::Config& cfg, double load = kDefaultLoad);

/// The toy energy as an incremental problem for the generic driver.
/// u = (u1, u2), z = (z).
class ToyProblem : public em::IncrementalProblem {
 public:
  enum class ZSolver { ClampedVertex, AugmentedLagrangian };

  explicit ToyProblem(double load = kDefaultLoad, ZSolver solver = ZSolver::ClampedVertex,
                      auglag::Config al = {});

  em::SubSolveInfo solve_equilibrium(double t, Eigen::VectorXd& u,
                                     const Eigen::VectorXd& z) override;
  em::SubSolveInfo solve_internal(double t, const Eigen::VectorXd& u, Eigen::VectorXd& z,
                                  const Eigen::VectorXd& z_prev, double rho) override;
  double increment_norm(const Eigen::VectorXd& z, const Eigen::VectorXd& z_prev) const override;
  double equilibrium_residual(double t, const Eigen::VectorXd& u,
                              const Eigen::VectorXd& z) const override;
  double total_energy(double t, const Eigen::VectorXd& u, const Eigen::VectorXd& z) const override;

 private:
  double load_;
  ZSolver solver_;
  auglag::Config al_;
};

// ---------------------------------------------------------------------------
// Snap-through truss

double snap_energy(double u, double F);
double snap_energy_du(double u, double F);
double snap_energy_du2(double u);

struct SnapSchedule {
  double f0 = -0.1;
  double rate = 0.25;
  double operator()(double t) const { return f0 + rate * t; }
};

struct SnapRecord {
  int step = 0;
  double t = 0.0;
  double dt = 0.0;
  double F = 0.0;
  double u = 0.0;
  int newton_iters = 0;
  bool converged = true;
};
using SnapTrajectory = std::vector<SnapRecord>;

/// Equilibrium on the near (u < fold) branch for F below the critical force.
double snap_equilibrium(double F, double lo = -1.0, double hi = 0.49);

struct Fold {
  double u = 0.0;
  double F = 0.0;
};
/// Limit point where dE/du = d2E/du2 = 0 on 0 < u < 1.
Fold snap_fold();

/// E&M: each step minimizes E(., F(t_{j-1})) over |u - u_{j-1}| <= rho by
/// projected Newton, then t_j = t_{j-1} + rho - |u_j - u_{j-1}|.
SnapTrajectory run_snap_em(const SnapSchedule& schedule, double rho, double u0, double t_end,
                           int max_newton = 50);
/// Unconstrained Newton from the previous solution at each t_j = j dt.
SnapTrajectory run_snap_local(const SnapSchedule& schedule, double dt, double u0, double t_end,
                              int max_newton = 500);
/// Grid argmin over [-1, 3] plus Brent polish at each t_j = j dt.
SnapTrajectory run_snap_global(const SnapSchedule& schedule, double dt, double u0, double t_end,
                               int points = 100000);

std::vector<int> newton_iteration_census(const SnapTrajectory& trajectory);

}  // namespace rivet::toy
