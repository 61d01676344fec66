#include "emdriver/em_driver.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "core/error.hpp"

namespace rivet::em {

void Config::validate() const {
  if (!(rho > 0.0)) throw Error(ErrorKind::InvalidArgument, "em: rho must be positive");
  if (!(t_end > 0.0)) throw Error(ErrorKind::InvalidArgument, "em: t_end must be positive");
  if (!(stag_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "em: stag_tol must be positive");
  if (max_am_iters < 1 || max_steps < 1) {
    throw Error(ErrorKind::InvalidArgument, "em: iteration caps must be >= 1");
  }
  if (!(constraint_tol >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "em: constraint_tol must be non-negative");
  }
  if (snapshot_every < 0) throw Error(ErrorKind::InvalidArgument, "em: snapshot_every < 0");
}

double time_update(double t, double rho, double dz_norm, double t_end, double rel_tol) {
  if (dz_norm > rho * (1.0 + rel_tol)) {
    throw Error(ErrorKind::ConstraintViolation,
                fmt::format("increment norm {:.6e} exceeds rho {:.6e}", dz_norm, rho));
  }
  const double used = std::clamp(dz_norm, 0.0, rho);
  return std::max(t, std::min(t + (rho - used), std::max(t, t_end)));
}

SweepResult am_sweep(IncrementalProblem& problem, double t, EvolutionState& state,
                     const Eigen::VectorXd& z_prev, double rho) {
  SweepResult r;
  try {
    r.equilibrium = problem.solve_equilibrium(t, state.u, state.z);
  } catch (const NonConvergenceError& e) {
    throw NonConvergenceError(fmt::format("equilibrium solve: {}", e.what()),
                              e.residual_history());
  }
  try {
    r.internal = problem.solve_internal(t, state.u, state.z, z_prev, rho);
  } catch (const NonConvergenceError& e) {
    throw NonConvergenceError(fmt::format("internal-variable solve: {}", e.what()),
                              e.residual_history());
  }
  return r;
}

StepRecord advance_step(IncrementalProblem& problem, const Config& config,
                        EvolutionState& state) {
  const Eigen::VectorXd z_prev = state.z;
  const int step = state.j + 1;
  state.j = step;
  problem.prepare_step(state.t, state.u);

  StepRecord rec;
  rec.step = step;
  std::vector<double> history;
  bool converged = false;
  for (int sweep = 1; sweep <= config.max_am_iters; ++sweep) {
    SweepResult sr;
    try {
      sr = am_sweep(problem, state.t, state, z_prev, config.rho);
    } catch (const NonConvergenceError& e) {
      throw NonConvergenceError(
          fmt::format("step {} (t = {:.9g}), sweep {}: {}", step, state.t, sweep, e.what()),
          e.residual_history());
    }
    rec.am_sweeps = sweep;
    rec.newton_max =
        std::max({rec.newton_max, sr.equilibrium.newton_iters, sr.internal.newton_iters});
    rec.auglag_iters += sr.internal.outer_iters;
    const double res = problem.equilibrium_residual(state.t, state.u, state.z);
    history.push_back(res);
    rec.stag_residual = res;
    if (res <= config.stag_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NonConvergenceError(
        fmt::format("step {} (t = {:.9g}): staggered loop did not converge in {} sweeps, "
                    "last residual {:.3e}",
                    step, state.t, config.max_am_iters, history.back()),
        history);
  }

  const double dz = problem.increment_norm(state.z, z_prev);
  const double t_next = time_update(state.t, config.rho, dz,
                                    std::numeric_limits<double>::infinity(),
                                    config.constraint_tol);
  rec.t = state.t;
  rec.dz_norm = std::clamp(dz, 0.0, config.rho);
  rec.dt = config.rho - rec.dz_norm;
  rec.energy = problem.total_energy(state.t, state.u, state.z);
  rec.dissipation_increment = problem.dissipation_increment(state.z, z_prev);
  rec.snapshot = (config.snapshot_every > 0 && step % config.snapshot_every == 0) ||
                 (config.snapshot_zero_dt && rec.dt <= 0.0);
  state.t = t_next;
  return rec;
}

Trajectory run_em(IncrementalProblem& problem, const Config& config, const Eigen::VectorXd& u0,
                  const Eigen::VectorXd& z0, const StepObserver& observer) {
  config.validate();
  Trajectory traj;
  EvolutionState state{u0, z0, 0.0, 0};
  // Termination is tested before the step; the last solved time is <= T.
  const double t_stop = config.t_end * (1.0 + 1e-12);
  while (state.t <= t_stop && state.j < config.max_steps) {
    const StepRecord rec = advance_step(problem, config, state);
    if (rec.snapshot) traj.snapshots.push_back({rec.step, rec.t, state.u, state.z});
    traj.steps.push_back(rec);
    if (observer) {
      EvolutionState view = state;
      view.t = rec.t;
      observer(rec, view);
    }
  }
  traj.final_state = std::move(state);
  return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
  os << "step,t,dt,dz_norm,am_sweeps,newton_max,auglag_iters,energy,dissipation_increment\n";
  for (const auto& r : trajectory.steps) {
    os << fmt::format("{},{:.15g},{:.15g},{:.15g},{},{},{},{:.15g},{:.15g}\n", r.step, r.t, r.dt,
                      r.dz_norm, r.am_sweeps, r.newton_max, r.auglag_iters, r.energy,
                      r.dissipation_increment);
  }
}

void write_trajectory_csv(const std::string& path, const Trajectory& trajectory) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
  write_trajectory_csv(os, trajectory);
  if (!os) throw Error(ErrorKind::Io, "write failed: " + path);
}

}  // namespace rivet::em
