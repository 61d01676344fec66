#pragma once

#include "emdriver/em_driver.hpp"
#include "fem/solvers.hpp"

namespace rivet::fem {

struct FemSolverSettings {
  norms::NormSpec norm = norms::NormSpec::lp(4);
  auglag::Config auglag;
  NewtonOptions newton_u;
  NewtonOptions newton_z;
};

/// Phase-field fracture as an incremental problem for the arc-length driver.
class FemProblem : public em::IncrementalProblem {
 public:
  FemProblem(const PhaseFieldModel& model, FemSolverSettings settings);

  const PhaseFieldModel& model() const { return model_; }
  const FemSolverSettings& settings() const { return settings_; }

  void prepare_step(double t, Eigen::VectorXd& u) override;
  em::SubSolveInfo solve_equilibrium(double t, Eigen::VectorXd& u,
                                     const Eigen::VectorXd& z) override;
  em::SubSolveInfo solve_internal(double t, const Eigen::VectorXd& u, Eigen::VectorXd& z,
                                  const Eigen::VectorXd& z_prev, double rho) override;
  double increment_norm(const Eigen::VectorXd& z, const Eigen::VectorXd& z_prev) const override;
  double equilibrium_residual(double t, const Eigen::VectorXd& u,
                              const Eigen::VectorXd& z) const override;
  double total_energy(double t, const Eigen::VectorXd& u, const Eigen::VectorXd& z) const override;
  double dissipation_increment(const Eigen::VectorXd& z,
                               const Eigen::VectorXd& z_prev) const override;

  /// u = 0 with the Dirichlet values at t = 0, z = 1.
  em::EvolutionState initial_state() const;

 private:
  const PhaseFieldModel& model_;
  FemSolverSettings settings_;
};

/// One full step: staggered sweeps with the multiplier loop inside, then the time update.
em::StepRecord fem_time_step(FemProblem& problem, const em::Config& cfg, em::EvolutionState& state);

}  // namespace rivet::fem
