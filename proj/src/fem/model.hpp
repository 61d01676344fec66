#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <string>
#include <vector>

#include "auglag/auglag.hpp"
#include "fem/element.hpp"
#include "fem/material.hpp"
#include "norms/norms.hpp"

namespace rivet::fem {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Scalar time function for prescribed data.
struct Amplitude {
  enum class Kind { Constant, Linear };
  Kind kind = Kind::Constant;
  double value = 0.0;
  double t_ref = 1.0;  ///< Linear: value is reached at t = t_ref

  static Amplitude constant(double v) { return {Kind::Constant, v, 1.0}; }
  static Amplitude linear(double v, double t_ref) { return {Kind::Linear, v, t_ref}; }
  double at(double t) const { return kind == Kind::Constant ? value : value * t / t_ref; }
};

struct DirichletBC {
  std::string set;
  int component = 0;  ///< 0 = x, 1 = y
  Amplitude amplitude;
};

/// Traction on the boundary edges whose end nodes both lie in `set`.
struct NeumannBC {
  std::string set;
  Eigen::Vector2d traction = Eigen::Vector2d::Zero();
  Amplitude scale = Amplitude::constant(1.0);
};

struct Loading {
  std::vector<DirichletBC> dirichlet;
  std::vector<NeumannBC> neumann;
};

/// Frozen data for the phase-field sub-problem at fixed displacement.
struct ZProblem {
  Eigen::VectorXd psi_plus;  ///< undegraded tensile energy per quadrature point
  Eigen::VectorXd z_prev;
  norms::NormSpec norm;
  double rho = 0.0;
};

struct ZEvaluation {
  Eigen::VectorXd r;
  norms::NormQuantities nq;
};

class PhaseFieldModel {
 public:
  PhaseFieldModel(Mesh mesh, MaterialParams mp, Loading loading);

  const Discretization& disc() const { return disc_; }
  const Mesh& mesh() const { return disc_.mesh; }
  const MaterialParams& material() const { return mp_; }
  const Loading& loading() const { return loading_; }
  int num_nodes() const { return disc_.num_nodes(); }
  int num_u_dofs() const { return 2 * disc_.num_nodes(); }
  int num_qp() const { return static_cast<int>(qp_offset_.back()); }
  const std::vector<char>& fixed_dofs() const { return fixed_; }

  void apply_dirichlet(double t, Eigen::VectorXd& u) const;

  Eigen::VectorXd external_force(double t) const;
  /// Internal force on every dof, constrained ones included.
  Eigen::VectorXd internal_force(const Eigen::VectorXd& u, const Eigen::VectorXd& z) const;
  /// Internal minus external force with constrained rows set to zero.
  Eigen::VectorXd residual_u(double t, const Eigen::VectorXd& u, const Eigen::VectorXd& z) const;
  /// Tangent with constrained rows and columns replaced by the identity.
  SparseMatrix tangent_uu(const Eigen::VectorXd& u, const Eigen::VectorXd& z) const;

  double stored_energy(const Eigen::VectorXd& u, const Eigen::VectorXd& z) const;
  double surface_energy(const Eigen::VectorXd& z) const;
  double external_work(double t, const Eigen::VectorXd& u) const;
  double total_energy(double t, const Eigen::VectorXd& u, const Eigen::VectorXd& z) const;

  Eigen::VectorXd psi_plus(const Eigen::VectorXd& u) const;
  ZProblem z_problem(const Eigen::VectorXd& u, const Eigen::VectorXd& z_prev,
                     const norms::NormSpec& norm, double rho) const;

  /// Gradient of the augmented Lagrangian in z.
  ZEvaluation residual_z(const ZProblem& zp, const Eigen::VectorXd& z,
                         const auglag::State& al) const;
  /// Sparse part of the z tangent; the full tangent adds nq.b * fz fz^T.
  SparseMatrix Kzz_sparse(const ZProblem& zp, const Eigen::VectorXd& z, const auglag::State& al,
                          const norms::NormQuantities& nq) const;
  /// z-dependent part of the augmented Lagrangian at frozen displacement.
  double augmented_energy_z(const ZProblem& zp, const Eigen::VectorXd& z,
                            const auglag::State& al) const;
  /// Total energy plus both penalty terms.
  double augmented_lagrangian(double t, const Eigen::VectorXd& u, const Eigen::VectorXd& z,
                              const Eigen::VectorXd& z_prev, const auglag::State& al,
                              const norms::NormSpec& norm, double rho) const;

  /// Diagonal of the phase-field operator at zero tensile energy.
  const Eigen::VectorXd& z_stiffness_diagonal() const { return kz_diag_; }
  /// Integral of each shape function.
  const Eigen::VectorXd& lumped_mass() const { return lumped_; }

  /// Sum of internal force components of the set's nodes in one direction.
  double reaction_force(const Eigen::VectorXd& u, const Eigen::VectorXd& z,
                        const std::string& set, int component) const;
  double dissipation_increment(const Eigen::VectorXd& z, const Eigen::VectorXd& z_prev) const;

 private:
  Discretization disc_;
  MaterialParams mp_;
  Loading loading_;
  std::vector<char> fixed_;
  std::vector<int> qp_offset_;
  Eigen::VectorXd kz_diag_;
  Eigen::VectorXd lumped_;
};

}  // namespace rivet::fem
