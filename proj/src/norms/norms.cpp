#include "norms/norms.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "auglag/auglag.hpp"
#include "core/error.hpp"

namespace rivet::norms {

using fem::Discretization;

void NormSpec::validate() const {
  if (kind == Kind::Lp && p < 2) throw Error(ErrorKind::InvalidArgument, "norm: p must be >= 2");
  if (s_floor < 0.0) throw Error(ErrorKind::InvalidArgument, "norm: s_floor must be positive");
}

double NormSpec::floor_for(double rho) const {
  if (s_floor > 0.0) return s_floor;
  const double r = 1e-8 * rho;
  return kind == Kind::H1 ? r * r : std::pow(r, p);
}

std::string NormSpec::name() const { return kind == Kind::H1 ? "H1" : fmt::format("L{}", p); }

namespace {

struct PointValue {
  double d;
  double dx;
  double dy;
};

PointValue interpolate(const fem::QuadPoint& q, const fem::Element& el, const Eigen::VectorXd& dz,
                       int nen) {
  PointValue v{0.0, 0.0, 0.0};
  for (int a = 0; a < nen; ++a) {
    const double za = dz[el.nodes[a]];
    v.d += q.N[a] * za;
    v.dx += q.dNdx[a] * za;
    v.dy += q.dNdy[a] * za;
  }
  return v;
}

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

void check_size(const Eigen::VectorXd& dz, const Discretization& disc) {
  if (dz.size() != disc.num_nodes()) {
    throw Error(ErrorKind::InvalidArgument, "norms: increment size does not match the mesh");
  }
}

// S and, optionally, its gradient.
double assemble_S(const Eigen::VectorXd& dz, const Discretization& disc, const NormSpec& spec,
                  Eigen::VectorXd* grad) {
  check_size(dz, disc);
  if (grad) grad->setZero(disc.num_nodes());
  double S = 0.0;
  const bool h1 = spec.kind == NormSpec::Kind::H1;
  const int p = spec.p;
  for (int e = 0; e < disc.mesh.num_elements(); ++e) {
    const auto& el = disc.mesh.elements[e];
    const auto& geo = disc.elements[e];
    for (const auto& q : geo.qp) {
      const PointValue v = interpolate(q, el, dz, geo.nen);
      if (h1) {
        S += q.w * (v.d * v.d + v.dx * v.dx + v.dy * v.dy);
        if (grad) {
          for (int a = 0; a < geo.nen; ++a) {
            (*grad)[el.nodes[a]] +=
                2.0 * q.w * (q.N[a] * v.d + q.dNdx[a] * v.dx + q.dNdy[a] * v.dy);
          }
        }
      } else {
        const double ad = std::abs(v.d);
        S += q.w * ipow(ad, p);
        if (grad) {
          const double s1 = p * ipow(ad, p - 1) * (v.d < 0.0 ? -1.0 : 1.0);
          for (int a = 0; a < geo.nen; ++a) (*grad)[el.nodes[a]] += q.w * s1 * q.N[a];
        }
      }
    }
  }
  return S;
}

}  // namespace

double integral_S(const Eigen::VectorXd& dz, const Discretization& disc, const NormSpec& spec) {
  return assemble_S(dz, disc, spec, nullptr);
}

double norm_value(const Eigen::VectorXd& dz, const Discretization& disc, const NormSpec& spec) {
  const double S = integral_S(dz, disc, spec);
  return spec.kind == NormSpec::Kind::H1 ? std::sqrt(S) : std::pow(S, 1.0 / spec.p);
}

NormQuantities lp_quantities(const Eigen::VectorXd& dz, const Discretization& disc, int p,
                             double lambda2, double alpha2, double rho, double s_floor) {
  NormSpec spec = NormSpec::lp(p);
  spec.s_floor = s_floor;
  spec.validate();
  NormQuantities q;
  q.S = assemble_S(dz, disc, spec, &q.fz);
  q.g = std::pow(q.S, 1.0 / p) - rho;
  const auto t = auglag::global_term(q.g, lambda2, alpha2);
  const double m = t.d1, H = t.d2 / alpha2;
  const double Se = std::max(q.S, spec.floor_for(rho));
  q.regularized = q.S < Se;
  const double pd = p;
  q.residual_scale = m * std::pow(Se, (1.0 - pd) / pd) / pd;
  q.b = ((1.0 - pd) * std::pow(Se, (1.0 - 2.0 * pd) / pd) * m +
         alpha2 * std::pow(Se, (2.0 - 2.0 * pd) / pd) * H) /
        (pd * pd);
  q.ksp_scale = (pd - 1.0) * m * std::pow(Se, (1.0 - pd) / pd);
  return q;
}

NormQuantities h1_quantities(const Eigen::VectorXd& dz, const Discretization& disc,
                             double lambda2, double alpha2, double rho, double s_floor) {
  NormSpec spec = NormSpec::h1();
  spec.s_floor = s_floor;
  NormQuantities q;
  q.S = assemble_S(dz, disc, spec, &q.fz);
  q.g = std::sqrt(q.S) - rho;
  const auto t = auglag::global_term(q.g, lambda2, alpha2);
  const double m = t.d1, H = t.d2 / alpha2;
  const double Se = std::max(q.S, spec.floor_for(rho));
  q.regularized = q.S < Se;
  q.residual_scale = 0.5 * m / std::sqrt(Se);
  q.b = 0.25 * (-m * std::pow(Se, -1.5) + alpha2 * H / Se);
  q.ksp_scale = m / std::sqrt(Se);
  return q;
}

NormQuantities quantities(const Eigen::VectorXd& dz, const Discretization& disc,
                          const NormSpec& spec, double lambda2, double alpha2, double rho) {
  if (spec.kind == NormSpec::Kind::H1) {
    return h1_quantities(dz, disc, lambda2, alpha2, rho, spec.s_floor);
  }
  return lp_quantities(dz, disc, spec.p, lambda2, alpha2, rho, spec.s_floor);
}

void add_sparse_tangent(std::vector<Eigen::Triplet<double>>& triplets, const Eigen::VectorXd& dz,
                        const Discretization& disc, const NormSpec& spec, double ksp_scale) {
  if (ksp_scale == 0.0) return;
  check_size(dz, disc);
  const bool h1 = spec.kind == NormSpec::Kind::H1;
  for (int e = 0; e < disc.mesh.num_elements(); ++e) {
    const auto& el = disc.mesh.elements[e];
    const auto& geo = disc.elements[e];
    double k[4][4] = {};
    for (const auto& q : geo.qp) {
      const double wd = h1 ? q.w : q.w * ipow(std::abs(interpolate(q, el, dz, geo.nen).d), spec.p - 2);
      for (int a = 0; a < geo.nen; ++a) {
        for (int b = 0; b < geo.nen; ++b) {
          double v = q.N[a] * q.N[b];
          if (h1) v += q.dNdx[a] * q.dNdx[b] + q.dNdy[a] * q.dNdy[b];
          k[a][b] += wd * v;
        }
      }
    }
    for (int a = 0; a < geo.nen; ++a)
      for (int b = 0; b < geo.nen; ++b)
        triplets.emplace_back(el.nodes[a], el.nodes[b], ksp_scale * k[a][b]);
  }
}

}  // namespace rivet::norms
