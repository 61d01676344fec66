#include <fmt/format.h>

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <random>

#include "criteria.hpp"
#include "fem/material.hpp"
#include "fem/model.hpp"
#include "fem/solvers.hpp"
#include "norms/norms.hpp"

namespace rivet::acceptance {

using namespace rivet::fem;

namespace {

std::mt19937 gen(7);

double uni(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }

Eigen::Matrix2d sym(double s) {
  const double a = uni(-s, s), b = uni(-s, s), c = uni(-s, s);
  return (Eigen::Matrix2d() << a, c, c, b).finished();
}

Eigen::VectorXd vec(int n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = uni(lo, hi);
  return v;
}

double rel(double a, double b, double floor) { return std::abs(a - b) / std::max(floor, std::abs(b)); }

double split_error() {
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Eigen::Matrix2d e = sym(i % 2 ? 1.0 : 1e-3);
    const auto s = spectral_split(e);
    const double sc = std::max(1.0, e.norm());
    worst = std::max(worst, (s.eps_plus + s.eps_minus - e).norm() / sc);
    worst = std::max(worst, std::abs((s.eps_plus.array() * s.eps_minus.array()).sum()) / sc);
  }
  return worst;
}

double stress_error(const MaterialParams& mp) {
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Matrix2d e = sym(0.02);
    const double z = uni(0.0, 1.0);
    const Eigen::Matrix2d s = stress(e, z, mp);
    const double h = 1e-7;
    Eigen::Matrix2d fd;
    for (int r = 0; r < 2; ++r) {
      for (int c = r; c < 2; ++c) {
        Eigen::Matrix2d d = Eigen::Matrix2d::Zero();
        d(r, c) = d(c, r) = h;
        const double v =
            (energy_density(e + d, z, mp).psi_total - energy_density(e - d, z, mp).psi_total) / (2 * h);
        fd(r, c) = fd(c, r) = r == c ? v : 0.5 * v;
      }
    }
    worst = std::max(worst, (fd - s).norm() / s.norm());
  }
  return worst;
}

double tangent_error(const MaterialParams& mp) {
  double worst = 0.0;
  int used = 0;
  while (used < 1000) {
    const Eigen::Matrix2d e = sym(0.02);
    const auto sp = spectral_split(e);
    if (std::abs(sp.eigvals[0] - sp.eigvals[1]) < 1e-4 || std::abs(sp.eigvals[0]) < 1e-4 ||
        std::abs(sp.eigvals[1]) < 1e-4 || std::abs(e.trace()) < 1e-4) {
      continue;
    }
    ++used;
    const double z = uni(0.0, 1.0);
    const Eigen::Matrix3d C = tangent_uu(e, z, mp);
    const double h = 1e-8;
    Eigen::Matrix3d fd;
    for (int j = 0; j < 3; ++j) {
      Eigen::Vector3d dv = Eigen::Vector3d::Zero();
      dv[j] = h;
      fd.col(j) = (stress_to_voigt(stress(e + strain_from_voigt(dv), z, mp)) -
                   stress_to_voigt(stress(e - strain_from_voigt(dv), z, mp))) /
                  (2 * h);
    }
    worst = std::max(worst, (fd - C).norm() / C.norm());
  }
  return worst;
}

Mesh mesh_3x3() {
  Mesh m = structured_rectangle(0, 0, 1, 1, 3, 3);
  m.nodes[5] += Eigen::Vector2d(0.03, -0.02);
  m.nodes[10] += Eigen::Vector2d(-0.04, 0.01);
  return m;
}

Loading pull() {
  Loading l;
  l.dirichlet = {{"left", 0, Amplitude::constant(0.0)},
                 {"bottom", 1, Amplitude::constant(0.0)},
                 {"right", 0, Amplitude::linear(0.05, 1.0)}};
  l.neumann = {{"top", Eigen::Vector2d(0.1, 0.3), Amplitude::constant(1.0)}};
  return l;
}

double ru_error(const PhaseFieldModel& m) {
  const double t = 0.6;
  Eigen::VectorXd u = vec(m.num_u_dofs(), -0.03, 0.03);
  m.apply_dirichlet(t, u);
  const Eigen::VectorXd z = vec(m.num_nodes(), 0.2, 1.0);
  const Eigen::VectorXd r = m.residual_u(t, u, z);
  double worst = 0.0;
  for (int i = 0; i < m.num_u_dofs(); ++i) {
    if (m.fixed_dofs()[i]) continue;
    const double h = 1e-7;
    Eigen::VectorXd up = u, um = u;
    up[i] += h;
    um[i] -= h;
    const double fd = (m.total_energy(t, up, z) - m.total_energy(t, um, z)) / (2 * h);
    worst = std::max(worst, rel(r[i], fd, 1e-3 * r.norm()));
  }
  return worst;
}

double rz_error(const PhaseFieldModel& m, const norms::NormSpec& spec) {
  const double t = 0.6, rho = 0.05;
  Eigen::VectorXd u = vec(m.num_u_dofs(), -0.03, 0.03);
  m.apply_dirichlet(t, u);
  const Eigen::VectorXd z_prev = vec(m.num_nodes(), 0.6, 1.0);
  Eigen::VectorXd z = z_prev - vec(m.num_nodes(), 0.0, 0.2);
  z[3] = z_prev[3] + 0.02;
  auglag::State al = auglag::State::fresh(m.num_nodes(), auglag::Config{});
  al.alpha1 = vec(m.num_nodes(), 5.0, 50.0);
  al.lambda1 = vec(m.num_nodes(), 0.0, 0.5);
  al.lambda2 = 0.4;
  al.alpha2 = 60.0;
  const auto zp = m.z_problem(u, z_prev, spec, rho);
  const Eigen::VectorXd r = m.residual_z(zp, z, al).r;
  double worst = 0.0;
  for (int a = 0; a < m.num_nodes(); ++a) {
    const double h = 1e-7;
    Eigen::VectorXd p = z, q = z;
    p[a] += h;
    q[a] -= h;
    const double fd = (m.augmented_lagrangian(t, u, p, z_prev, al, spec, rho) -
                       m.augmented_lagrangian(t, u, q, z_prev, al, spec, rho)) /
                      (2 * h);
    worst = std::max(worst, rel(r[a], fd, 1e-3 * r.norm()));
  }
  return worst;
}

double sherman_morrison_error() {
  const int n = 500;
  std::vector<Eigen::Triplet<double>> t;
  Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(n);
  for (int i = 1; i < n; ++i) {
    for (int j : {i - 1, static_cast<int>(uni(0, i))}) {
      const double v = uni(-1, 1);
      t.emplace_back(i, j, v);
      t.emplace_back(j, i, v);
      rowsum[i] += std::abs(v);
      rowsum[j] += std::abs(v);
    }
  }
  for (int i = 0; i < n; ++i) t.emplace_back(i, i, rowsum[i] + uni(0.5, 1.5));
  SparseMatrix K(n, n);
  K.setFromTriplets(t.begin(), t.end());
  double worst = 0.0;
  for (double b : {0.8, -0.05, 4.0}) {
    const Eigen::VectorXd f = vec(n, -1, 1), r = vec(n, -1, 1);
    const Eigen::VectorXd dense = (Eigen::MatrixXd(K) + b * f * f.transpose()).partialPivLu().solve(r);
    worst = std::max(worst, (sherman_morrison_solve(K, b, f, r) - dense).norm() / dense.norm());
  }
  return worst;
}

double norm_error(const norms::NormSpec& spec) {
  const Discretization d(structured_rectangle(0, 0, 1, 1, 3, 3));
  const Eigen::VectorXd v = vec(d.num_nodes(), -0.3, 0.0);
  const double rho = 0.05, l2 = 0.6, a2 = 30.0;
  const auto q = norms::quantities(v, d, spec, l2, a2, rho);
  auto value = [&](const Eigen::VectorXd& x) {
    return auglag::global_term(norms::norm_value(x, d, spec) - rho, l2, a2).value;
  };
  const Eigen::VectorXd r = q.residual_scale * q.fz;
  double worst = 0.0;
  for (int a = 0; a < d.num_nodes(); ++a) {
    const double h = 1e-6;
    Eigen::VectorXd p = v, m = v;
    p[a] += h;
    m[a] -= h;
    worst = std::max(worst, rel(r[a], (value(p) - value(m)) / (2 * h), 1e-3 * r.norm()));
  }
  return worst;
}

}  // namespace

Outcome criterion_fem_oracles() {
  const auto t0 = std::chrono::steady_clock::now();
  Checklist c;
  const MaterialParams mp;
  const double e_split = split_error();
  const double e_stress = stress_error(mp);
  const double e_tan = tangent_error(mp);
  const PhaseFieldModel model(mesh_3x3(), mp, pull());
  const double e_ru = ru_error(model);
  double e_rz = 0.0;
  for (const auto& s : {norms::NormSpec::lp(2), norms::NormSpec::lp(4), norms::NormSpec::h1()})
    e_rz = std::max(e_rz, rz_error(model, s));
  const double e_sm = sherman_morrison_error();
  const double e_l2 = norm_error(norms::NormSpec::lp(2));
  const double e_l4 = norm_error(norms::NormSpec::lp(4));
  const double e_h1 = norm_error(norms::NormSpec::h1());

  c.note(fmt::format("split {:.1e}, stress {:.1e}, tangent {:.1e}, r_u {:.1e}, r_z {:.1e}, "
                     "Sherman-Morrison {:.1e}, norms L2/L4/H1 {:.1e}/{:.1e}/{:.1e}",
                     e_split, e_stress, e_tan, e_ru, e_rz, e_sm, e_l2, e_l4, e_h1));
  c.add("spectral split 1e-12", e_split <= 1e-12);
  c.add("stress 1e-6", e_stress < 1e-6);
  c.add("tangent 1e-5", e_tan < 1e-5);
  c.add("r_u 1e-6", e_ru < 1e-6);
  c.add("r_z 1e-6", e_rz < 1e-6);
  c.add("Sherman-Morrison 1e-10", e_sm < 1e-10);
  c.add("norm quantities 1e-6", e_l2 < 1e-6 && e_l4 < 1e-6 && e_h1 < 1e-6);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.note(fmt::format("{:.2f} s", secs));
  c.add("runtime < 120 s", secs < 120.0);
  return c.outcome();
}

}  // namespace rivet::acceptance
