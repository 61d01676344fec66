#pragma once

#include <Eigen/Core>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace rivet::em {

struct Config {
  double rho = 0.01;        ///< arc-length parameter, in units of the increment norm
  double t_end = 1.0;       ///< final time T
  double stag_tol = 1e-6;   ///< staggered fixed-point tolerance on ||r_u|| (force units)
  int max_am_iters = 500;   ///< alternate-minimization sweeps per step
  int max_steps = 100000;
  double constraint_tol = 1e-9;  ///< relative slack on ||dz|| <= rho before it is an error

  /// Snapshot every k-th step (0 disables) and/or every frozen-time step.
  int snapshot_every = 0;
  bool snapshot_zero_dt = false;

  void validate() const;
};

struct EvolutionState {
  Eigen::VectorXd u;
  Eigen::VectorXd z;
  double t = 0.0;
  int j = 0;
};

/// Iteration counts reported by one sub-solve.
struct SubSolveInfo {
  int newton_iters = 0;
  int outer_iters = 0;
};

struct StepRecord {
  int step = 0;
  double t = 0.0;
  double dt = 0.0;
  double dz_norm = 0.0;  ///< clamped increment norm actually used in the time update
  int am_sweeps = 0;
  int newton_max = 0;
  int auglag_iters = 0;
  double energy = 0.0;
  double dissipation_increment = 0.0;
  double stag_residual = 0.0;
  bool snapshot = false;
};

struct Snapshot {
  int step = 0;
  double t = 0.0;
  Eigen::VectorXd u;
  Eigen::VectorXd z;
};

struct Trajectory {
  std::vector<StepRecord> steps;
  std::vector<Snapshot> snapshots;
  EvolutionState final_state;
};

/// The three ingredients an incremental problem has to offer the driver:
/// unconstrained equilibrium minimization at fixed z, the constrained
/// internal-variable minimization at fixed u, and the arc-length norm.
class IncrementalProblem {
 public:
  virtual ~IncrementalProblem() = default;

  /// Called once per step before the first sweep (boundary data at t).
  virtual void prepare_step(double /*t*/, Eigen::VectorXd& /*u*/) {}

  virtual SubSolveInfo solve_equilibrium(double t, Eigen::VectorXd& u,
                                         const Eigen::VectorXd& z) = 0;

  /// Minimize over z subject to z <= z_prev and ||z - z_prev|| <= rho.
  virtual SubSolveInfo solve_internal(double t, const Eigen::VectorXd& u, Eigen::VectorXd& z,
                                      const Eigen::VectorXd& z_prev, double rho) = 0;

  virtual double increment_norm(const Eigen::VectorXd& z, const Eigen::VectorXd& z_prev) const = 0;

  /// Euclidean norm of the equilibrium residual r_u(t, u, z).
  virtual double equilibrium_residual(double t, const Eigen::VectorXd& u,
                                      const Eigen::VectorXd& z) const = 0;

  virtual double total_energy(double t, const Eigen::VectorXd& u,
                              const Eigen::VectorXd& z) const = 0;

  virtual double dissipation_increment(const Eigen::VectorXd& /*z*/,
                                       const Eigen::VectorXd& /*z_prev*/) const {
    return 0.0;
  }
};

using StepObserver = std::function<void(const StepRecord&, const EvolutionState&)>;

/// t + rho - dz_norm with dz_norm clamped to [0, rho], capped at t_end. An
/// increment larger than rho*(1 + rel_tol) means the constrained z-solve failed.
double time_update(double t, double rho, double dz_norm,
                   double t_end = std::numeric_limits<double>::infinity(),
                   double rel_tol = 1e-9);

struct SweepResult {
  SubSolveInfo equilibrium;
  SubSolveInfo internal;
};

/// One alternate-minimization pass at fixed t: u-solve, then constrained z-solve.
SweepResult am_sweep(IncrementalProblem& problem, double t, EvolutionState& state,
                     const Eigen::VectorXd& z_prev, double rho);

/// Solve one step at state.t and advance the state to the next time. The
/// returned record carries the solved time and the increment bookkeeping.
StepRecord advance_step(IncrementalProblem& problem, const Config& config,
                        EvolutionState& state);

Trajectory run_em(IncrementalProblem& problem, const Config& config, const Eigen::VectorXd& u0,
                  const Eigen::VectorXd& z0, const StepObserver& observer = {});

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);
void write_trajectory_csv(const std::string& path, const Trajectory& trajectory);

}  // namespace rivet::em
