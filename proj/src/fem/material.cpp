#include "fem/material.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace rivet::fem {

namespace {

double pos(double x) { return x > 0.0 ? x : 0.0; }
double neg(double x) { return x < 0.0 ? x : 0.0; }

struct Eig2 {
  double l1, l2;
  Eigen::Vector2d v1, v2;
};

Eig2 eig_sym(const Eigen::Matrix2d& e) {
  const double a = e(0, 0), b = e(1, 1), c = 0.5 * (e(0, 1) + e(1, 0));
  const double m = 0.5 * (a + b);
  const double r = std::hypot(0.5 * (a - b), c);
  const double th = 0.5 * std::atan2(2.0 * c, a - b);
  Eig2 out;
  out.l1 = m + r;
  out.l2 = m - r;
  out.v1 = Eigen::Vector2d(std::cos(th), std::sin(th));
  out.v2 = Eigen::Vector2d(-std::sin(th), std::cos(th));
  return out;
}

const Eigen::Matrix2d kVoigtBasis[3] = {
    (Eigen::Matrix2d() << 1, 0, 0, 0).finished(),
    (Eigen::Matrix2d() << 0, 0, 0, 1).finished(),
    (Eigen::Matrix2d() << 0, 0.5, 0.5, 0).finished(),
};

}  // namespace

void MaterialParams::validate() const {
  if (!(E > 0.0)) throw Error(ErrorKind::InvalidArgument, "material: E must be positive");
  if (!(nu >= 0.0 && nu < 0.5)) throw Error(ErrorKind::InvalidArgument, "material: nu in [0,0.5)");
  if (!(gc > 0.0)) throw Error(ErrorKind::InvalidArgument, "material: gc must be positive");
  if (!(l > 0.0)) throw Error(ErrorKind::InvalidArgument, "material: l must be positive");
  if (!(k > 0.0 && k < 1.0)) throw Error(ErrorKind::InvalidArgument, "material: k in (0,1)");
}

Eigen::Matrix2d strain_from_voigt(const Eigen::Vector3d& v) {
  Eigen::Matrix2d e;
  e << v[0], 0.5 * v[2], 0.5 * v[2], v[1];
  return e;
}

Eigen::Vector3d stress_to_voigt(const Eigen::Matrix2d& s) {
  return {s(0, 0), s(1, 1), 0.5 * (s(0, 1) + s(1, 0))};
}

SpectralSplit spectral_split(const Eigen::Matrix2d& eps) {
  const Eig2 d = eig_sym(eps);
  const Eigen::Matrix2d P1 = d.v1 * d.v1.transpose();
  const Eigen::Matrix2d P2 = d.v2 * d.v2.transpose();
  SpectralSplit s;
  s.eps_plus = pos(d.l1) * P1 + pos(d.l2) * P2;
  s.eps_minus = neg(d.l1) * P1 + neg(d.l2) * P2;
  s.eigvals = Eigen::Vector2d(d.l1, d.l2);
  s.eigvecs.col(0) = d.v1;
  s.eigvecs.col(1) = d.v2;
  return s;
}

PointResponse point_response(const Eigen::Matrix2d& eps, double z, const MaterialParams& mp,
                             bool with_tangent) {
  const double lam = mp.lame_lambda(), mu = mp.lame_mu();
  const double gz = z * z + mp.k;
  Eig2 d = eig_sym(eps);
  const double tr = eps.trace();
  const Eigen::Matrix2d P1 = d.v1 * d.v1.transpose();
  const Eigen::Matrix2d P2 = d.v2 * d.v2.transpose();

  PointResponse r;
  r.psi_plus = 0.5 * lam * pos(tr) * pos(tr) + mu * (pos(d.l1) * pos(d.l1) + pos(d.l2) * pos(d.l2));
  r.psi_minus =
      0.5 * lam * neg(tr) * neg(tr) + mu * (neg(d.l1) * neg(d.l1) + neg(d.l2) * neg(d.l2));
  r.psi_total = gz * r.psi_plus + r.psi_minus;

  const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d ep = pos(d.l1) * P1 + pos(d.l2) * P2;
  const Eigen::Matrix2d em = neg(d.l1) * P1 + neg(d.l2) * P2;
  const Eigen::Matrix2d sig =
      gz * (lam * pos(tr) * I + 2.0 * mu * ep) + (lam * neg(tr) * I + 2.0 * mu * em);
  r.sigma = stress_to_voigt(sig);
  if (!with_tangent) return r;

  // Near-coincident eigenvalues: separate them so the divided difference is defined.
  if (std::abs(d.l1 - d.l2) < 1e-8 * std::max(1.0, std::abs(d.l1) + std::abs(d.l2))) {
    d.l1 += 1e-8;
    d.l2 -= 1e-8;
  }
  const double hp1 = d.l1 > 0.0 ? 1.0 : 0.0, hp2 = d.l2 > 0.0 ? 1.0 : 0.0;
  const double dd_plus = (pos(d.l1) - pos(d.l2)) / (d.l1 - d.l2);
  const double dd_minus = (neg(d.l1) - neg(d.l2)) / (d.l1 - d.l2);
  const double htr = tr > 0.0 ? 1.0 : 0.0;

  for (int j = 0; j < 3; ++j) {
    const Eigen::Matrix2d& de = kVoigtBasis[j];
    const double c1 = (P1.array() * de.array()).sum();
    const double c2 = (P2.array() * de.array()).sum();
    const Eigen::Matrix2d cross = P1 * de * P2 + P2 * de * P1;
    const Eigen::Matrix2d dep = hp1 * c1 * P1 + hp2 * c2 * P2 + dd_plus * cross;
    const Eigen::Matrix2d dem = (1.0 - hp1) * c1 * P1 + (1.0 - hp2) * c2 * P2 + dd_minus * cross;
    const double dtr = de.trace();
    const Eigen::Matrix2d dsig = gz * (lam * htr * dtr * I + 2.0 * mu * dep) +
                                 (lam * (1.0 - htr) * dtr * I + 2.0 * mu * dem);
    r.C.col(j) = stress_to_voigt(dsig);
  }
  r.C = 0.5 * (r.C + r.C.transpose()).eval();
  return r;
}

EnergyDensity energy_density(const Eigen::Matrix2d& eps, double z, const MaterialParams& mp) {
  const auto r = point_response(eps, z, mp, false);
  return {r.psi_plus, r.psi_minus, r.psi_total};
}

Eigen::Matrix2d stress(const Eigen::Matrix2d& eps, double z, const MaterialParams& mp) {
  const Eigen::Vector3d s = point_response(eps, z, mp, false).sigma;
  return (Eigen::Matrix2d() << s[0], s[2], s[2], s[1]).finished();
}

Eigen::Matrix3d tangent_uu(const Eigen::Matrix2d& eps, double z, const MaterialParams& mp) {
  return point_response(eps, z, mp, true).C;
}

}  // namespace rivet::fem
