#pragma once

#include <Eigen/SparseCholesky>
#include <vector>

#include "auglag/auglag.hpp"
#include "fem/model.hpp"

namespace rivet::fem {

/// Cholesky factor that reuses the symbolic analysis while the sparsity
/// pattern stays the same.
class SpdFactor {
 public:
  void factorize(const SparseMatrix& K);
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

 private:
  Eigen::SimplicialLLT<SparseMatrix> llt_;
  std::vector<SparseMatrix::StorageIndex> outer_, inner_;
  bool analyzed_ = false;
};

/// Direct solve with iterative refinement; throws a solver error if the
/// matrix is not positive definite or ||Kx - rhs|| > 1e-10 ||rhs||.
Eigen::VectorXd solve_sparse_spd(const SparseMatrix& K, const Eigen::VectorXd& rhs);

/// (Ksp + b fz fz^T)^{-1} rz from two solves with the sparse factor.
Eigen::VectorXd sherman_morrison_solve(const SpdFactor& factor, double b, const Eigen::VectorXd& fz,
                                       const Eigen::VectorXd& rz);
Eigen::VectorXd sherman_morrison_solve(const SparseMatrix& Ksp, double b, const Eigen::VectorXd& fz,
                                       const Eigen::VectorXd& rz);

struct NewtonOptions {
  double rel_tol = 1e-8;     ///< relative to the first residual of the solve
  double abs_tol = 1e-12;
  double scale_tol = 1e-13;  ///< relative to the problem's force scale
  /// A residual below stall_tol * scale that no longer halves per iteration
  /// is at round-off level and accepted.
  double stall_tol = 1e-8;
  /// Phase-field solve only: accepted when -r.d <= decrement_tol * (1 + |E|)
  /// and the Newton correction d is at most step_tol in every node.
  double decrement_tol = 1e-14;
  double step_tol = 1e-6;
  int max_iters = 25;
};

struct NewtonReport {
  int iters = 0;
  std::vector<double> history;
};

/// Minimize the total energy in u at fixed z. Dirichlet values at t are imposed first.
NewtonReport newton_solve_u(const PhaseFieldModel& model, double t, Eigen::VectorXd& u,
                            const Eigen::VectorXd& z, const NewtonOptions& opts = {});

/// Minimize the augmented energy in z at fixed displacement and multipliers.
NewtonReport newton_solve_z(const PhaseFieldModel& model, const ZProblem& zp, Eigen::VectorXd& z,
                            const auglag::State& al, const NewtonOptions& opts = {});

struct AugLagReport {
  int outer_iters = 0;
  int newton_max = 0;
  auglag::State state;
};

/// Method-of-multipliers loop for the constrained phase-field step. The
/// configured initial penalties are multiplied by the stiffness scales of
/// each constraint family.
AugLagReport solve_z_auglag(const PhaseFieldModel& model, const ZProblem& zp, Eigen::VectorXd& z,
                            const auglag::Config& cfg, const NewtonOptions& opts = {});

/// Penalty scales: diagonal phase-field stiffness per node, and
/// (gc/l) |Omega|^(1 - 2/p) for the norm ball (gc/l for H1).
double global_penalty_scale(const PhaseFieldModel& model, const norms::NormSpec& norm);

}  // namespace rivet::fem
