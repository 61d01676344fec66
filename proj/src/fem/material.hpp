#pragma once

#include <Eigen/Core>

namespace rivet::fem {

struct MaterialParams {
  double E = 100.0;    ///< MPa
  double nu = 0.3;
  double gc = 1.0;     ///< N/mm
  double l = 0.05;     ///< mm
  double k = 1e-6;     ///< residual stiffness

  double lame_lambda() const { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
  double lame_mu() const { return E / (2.0 * (1.0 + nu)); }
  void validate() const;
};

struct SpectralSplit {
  Eigen::Matrix2d eps_plus;
  Eigen::Matrix2d eps_minus;
  Eigen::Vector2d eigvals;  ///< descending
  Eigen::Matrix2d eigvecs;  ///< columns match eigvals
};

SpectralSplit spectral_split(const Eigen::Matrix2d& eps);

struct EnergyDensity {
  double psi_plus = 0.0;
  double psi_minus = 0.0;
  double psi_total = 0.0;
};

EnergyDensity energy_density(const Eigen::Matrix2d& eps, double z, const MaterialParams& mp);

Eigen::Matrix2d stress(const Eigen::Matrix2d& eps, double z, const MaterialParams& mp);

/// Voigt convention: strain (e11, e22, 2 e12), stress (s11, s22, s12).
Eigen::Matrix3d tangent_uu(const Eigen::Matrix2d& eps, double z, const MaterialParams& mp);

Eigen::Matrix2d strain_from_voigt(const Eigen::Vector3d& v);
Eigen::Vector3d stress_to_voigt(const Eigen::Matrix2d& s);

/// Stress and tangent at one point, sharing the eigen-decomposition.
struct PointResponse {
  double psi_plus = 0.0;
  double psi_minus = 0.0;
  double psi_total = 0.0;
  Eigen::Vector3d sigma;
  Eigen::Matrix3d C;
};
PointResponse point_response(const Eigen::Matrix2d& eps, double z, const MaterialParams& mp,
                             bool with_tangent);

}  // namespace rivet::fem
