#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <string>
#include <vector>

#include "fem/element.hpp"

namespace rivet::norms {

struct NormSpec {
  enum class Kind { Lp, H1 };
  Kind kind = Kind::Lp;
  int p = 4;
  /// Floor for S in the negative powers; 0 selects (1e-8 rho)^p, or (1e-8 rho)^2 for H1.
  double s_floor = 0.0;

  static NormSpec lp(int p) { return {Kind::Lp, p, 0.0}; }
  static NormSpec h1() { return {Kind::H1, 2, 0.0}; }

  void validate() const;
  double floor_for(double rho) const;
  std::string name() const;
};

/// Scalars and the assembled vector for the norm-ball term at one iterate.
/// `fz` is the gradient of S with respect to the nodal values; the residual
/// contribution is `residual_scale * fz` and the tangent is
/// `b * fz fz^T + ksp_scale * M_s` with M_s from add_sparse_tangent.
struct NormQuantities {
  double S = 0.0;
  double g = 0.0;
  double b = 0.0;
  double ksp_scale = 0.0;
  double residual_scale = 0.0;
  Eigen::VectorXd fz;
  bool regularized = false;  ///< S was below the floor
};

/// dz is the nodal increment z - z_prev.
double integral_S(const Eigen::VectorXd& dz, const fem::Discretization& disc, const NormSpec& spec);

double norm_value(const Eigen::VectorXd& dz, const fem::Discretization& disc, const NormSpec& spec);

NormQuantities lp_quantities(const Eigen::VectorXd& dz, const fem::Discretization& disc, int p,
                             double lambda2, double alpha2, double rho, double s_floor);

NormQuantities h1_quantities(const Eigen::VectorXd& dz, const fem::Discretization& disc,
                             double lambda2, double alpha2, double rho, double s_floor);

NormQuantities quantities(const Eigen::VectorXd& dz, const fem::Discretization& disc,
                          const NormSpec& spec, double lambda2, double alpha2, double rho);

/// Adds ksp_scale * (integral of the second variation of s against N_A N_B) to the triplets.
void add_sparse_tangent(std::vector<Eigen::Triplet<double>>& triplets, const Eigen::VectorXd& dz,
                        const fem::Discretization& disc, const NormSpec& spec, double ksp_scale);

}  // namespace rivet::norms
