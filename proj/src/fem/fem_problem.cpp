#include "fem/fem_problem.hpp"

namespace rivet::fem {

FemProblem::FemProblem(const PhaseFieldModel& model, FemSolverSettings settings)
    : model_(model), settings_(std::move(settings)) {
  settings_.norm.validate();
  settings_.auglag.validate();
}

void FemProblem::prepare_step(double t, Eigen::VectorXd& u) { model_.apply_dirichlet(t, u); }

em::SubSolveInfo FemProblem::solve_equilibrium(double t, Eigen::VectorXd& u,
                                               const Eigen::VectorXd& z) {
  const NewtonReport r = newton_solve_u(model_, t, u, z, settings_.newton_u);
  return {r.iters, 0};
}

em::SubSolveInfo FemProblem::solve_internal(double, const Eigen::VectorXd& u, Eigen::VectorXd& z,
                                            const Eigen::VectorXd& z_prev, double rho) {
  const ZProblem zp = model_.z_problem(u, z_prev, settings_.norm, rho);
  const AugLagReport r = solve_z_auglag(model_, zp, z, settings_.auglag, settings_.newton_z);
  return {r.newton_max, r.outer_iters};
}

double FemProblem::increment_norm(const Eigen::VectorXd& z, const Eigen::VectorXd& z_prev) const {
  return norms::norm_value(z - z_prev, model_.disc(), settings_.norm);
}

double FemProblem::equilibrium_residual(double t, const Eigen::VectorXd& u,
                                        const Eigen::VectorXd& z) const {
  return model_.residual_u(t, u, z).norm();
}

double FemProblem::total_energy(double t, const Eigen::VectorXd& u,
                                const Eigen::VectorXd& z) const {
  return model_.total_energy(t, u, z);
}

double FemProblem::dissipation_increment(const Eigen::VectorXd& z,
                                         const Eigen::VectorXd& z_prev) const {
  return model_.dissipation_increment(z, z_prev);
}

em::EvolutionState FemProblem::initial_state() const {
  em::EvolutionState s;
  s.u = Eigen::VectorXd::Zero(model_.num_u_dofs());
  model_.apply_dirichlet(0.0, s.u);
  s.z = Eigen::VectorXd::Ones(model_.num_nodes());
  return s;
}

em::StepRecord fem_time_step(FemProblem& problem, const em::Config& cfg,
                             em::EvolutionState& state) {
  cfg.validate();
  return em::advance_step(problem, cfg, state);
}

}  // namespace rivet::fem
