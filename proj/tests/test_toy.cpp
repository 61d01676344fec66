#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "doctest.h"
#include "toy/toy.hpp"

using namespace rivet::toy;

namespace {

// Second evaluator of the polynomial, expanded by hand in powers of z.
double energy_expanded(double t, double u1, double u2, double z) {
  const double z2 = z * z;
  return 58.0 * (z2 + 28.0 * z + 196.0) + u1 * u1 * (60.0 * z2 + 240.0 * z + 316.0) +
         u1 * (-4.0 * z2 + 128.0 * z - 1032.0) + u2 * u2 * (15.0 * z2 - 990.0 * z + 16435.0) +
         u2 * (25.0 * z2 - 1000.0 * z + 10000.0) - 2000.0 * t * u2;
}

// Numeric minimizer of the u-quadratic: Hessian and gradient at 0 by differences, one Newton step.
Eigen::Vector2d numeric_u_min(double t, double z) {
  auto f = [&](double a, double b) { return energy_expanded(t, a, b, z); };
  const double h = 1.0;
  Eigen::Matrix2d H;
  H(0, 0) = (f(h, 0) - 2 * f(0, 0) + f(-h, 0)) / (h * h);
  H(1, 1) = (f(0, h) - 2 * f(0, 0) + f(0, -h)) / (h * h);
  H(0, 1) = H(1, 0) = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h);
  Eigen::Vector2d g((f(h, 0) - f(-h, 0)) / (2 * h), (f(0, h) - f(0, -h)) / (2 * h));
  return -H.ldlt().solve(g);
}

}  // namespace

TEST_SUITE("toy") {
  TEST_CASE("energy examples") {
    CHECK(toy_energy(0, 0, 0, 0) == 11368.0);
    for (double t : {0.0, 0.7, 3.0}) {
      CHECK(toy_energy(t, 0, 0, 5.0) == doctest::Approx(58.0 * 19.0 * 19.0));
    }
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> d(-3.0, 3.0), dz(-30.0, 40.0);
    for (int i = 0; i < 1000; ++i) {
      const double t = d(rng), u1 = d(rng), u2 = d(rng), z = dz(rng);
      const double a = toy_energy(t, u1, u2, z), b = energy_expanded(t, u1, u2, z);
      CHECK(std::abs(a - b) <= 1e-11 * std::max(1.0, std::abs(a)) * 100);
    }
  }

  TEST_CASE("u minimizer") {
    auto m = toy_u_min(0.0, 20.0);
    CHECK(m.u2 == 0.0);
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> dt(0.0, 3.0), dz(-30.0, 40.0);
    for (int i = 0; i < 10000; ++i) {
      const double t = dt(rng), z = dz(rng);
      const auto u = toy_u_min(t, z);
      const auto g = toy_energy_du(t, u.u1, u.u2, z);
      CHECK(std::abs(g.u1) < 1e-9);
      CHECK(std::abs(g.u2) < 1e-9);
      if (i < 200) {
        const Eigen::Vector2d o = numeric_u_min(t, z);
        CHECK(std::abs(o[0] - u.u1) <= 1e-10 * std::max(1.0, std::abs(u.u1)));
        CHECK(std::abs(o[1] - u.u2) <= 1e-10 * std::max(1.0, std::abs(u.u2)));
      }
    }
  }

  TEST_CASE("z-quadratic reproduces the energy") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> d(-2.0, 2.0), dz(-30.0, 40.0);
    for (int i = 0; i < 200; ++i) {
      const double t = d(rng), u1 = d(rng), u2 = d(rng), z = dz(rng);
      const auto q = toy_energy_in_z(t, u1, u2);
      CHECK(q.a > 0.0);
      CHECK(q.a * z * z + q.b * z + q.c ==
            doctest::Approx(toy_energy(t, u1, u2, z)).epsilon(1e-11));
    }
  }

  TEST_CASE("reduced energy derivative agrees with the envelope partial") {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> dt(0.0, 2.5), dz(-30.0, 40.0), du(-2.0, 2.0);
    for (int i = 0; i < 500; ++i) {
      const double t = dt(rng), z = dz(rng);
      const double fd = reduced_energy_dz(t, z), an = reduced_energy_dz_envelope(t, z);
      const double scale = std::max(std::abs(an), 1e-2 * (std::abs(reduced_energy(t, z)) + 1.0));
      CHECK(std::abs(fd - an) <= 1e-6 * scale);
      CHECK(reduced_energy(t, z) <= toy_energy(t, du(rng), du(rng), z) + 1e-9);
    }
  }

  TEST_CASE("reduced energy has a local minimum near the start value") {
    const double t1 = 0.001;
    const double zl = nearest_stable_below(t1, 34.0);
    CHECK(std::abs(zl - 33.5) < 0.5);
    CHECK(reduced_energy(t1, zl) < reduced_energy(t1, zl - 0.2));
    CHECK(reduced_energy(t1, zl) < reduced_energy(t1, zl + 0.2));
  }

  TEST_CASE("stable set structure") {
    CHECK(locally_stable(0.0, 33.5));
    CHECK_FALSE(locally_stable(2.0, 33.5));
    auto map = stable_set_scan(0.0, 2.0, 201, -30.0, 40.0, 701);
    CHECK(map.flags.size() == 201u * 701u);
    // upper-branch edge: follow the stable region downward from 33.5 as t increases
    double t_cross = -1.0;
    for (std::size_t i = 0; i < map.t.size(); ++i) {
      const double t = map.t[i];
      const double z_up = nearest_stable_below(t, 33.5);
      if (z_up < 20.0) {
        t_cross = t;
        break;
      }
    }
    CHECK(std::abs(t_cross - 1.28) <= 0.01);
    // flags agree with the sign of the reduced derivative
    for (std::size_t i = 0; i < map.t.size(); i += 37) {
      for (std::size_t k = 0; k < map.z.size(); k += 53) {
        CHECK(map.stable(i, k) == (reduced_energy_dz(map.t[i], map.z[k]) <= 0.0));
      }
    }
  }

  TEST_CASE("alternate minimization") {
    auto tr = run_toy_am(33.5, 0.001, 20, 2.0);
    REQUIRE(tr.size() == 2001);
    double t_leave = -1.0, t_jump = -1.0;
    std::size_t jump_idx = 0;
    for (std::size_t i = 1; i < tr.size(); ++i) {
      if (t_leave < 0.0 && tr[i].z < 33.5) t_leave = tr[i].t;
      if (t_jump < 0.0 && tr[i - 1].z - tr[i].z > 1.0) {
        t_jump = tr[i].t;
        jump_idx = i;
      }
      CHECK(tr[i].z <= tr[i - 1].z);
    }
    CHECK(std::abs(t_leave - 1.16) < 0.02);
    CHECK(std::abs(t_jump - 1.28) < 0.01);
    // lands at the global minimum of the reduced energy at the jump time
    std::size_t land = jump_idx;
    while (land + 1 < tr.size() && tr[land].z - tr[land + 1].z > 1e-3) ++land;
    const double zg = global_z_min(tr[land].t, 40.0);
    CHECK(std::abs(tr[land].z - zg) < 1e-3);

    auto flat = run_toy_am(33.5, 0.01, 20, 2.0, 0.0);
    for (const auto& r : flat) CHECK(r.z == flat.front().z);
  }

  TEST_CASE("combined scheme") {
    auto tr = run_toy_em(33.5, 0.001, 2.0, 20);
    double plateau = -1.0;
    for (const auto& r : tr) {
      CHECK(r.dz <= 0.001 * (1 + 1e-12));
      CHECK(std::abs(r.dt + r.dz - 0.001) < 1e-15);
      if (plateau < 0.0 && r.dt == 0.0 && r.z < 30.0) plateau = r.t;
    }
    for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr[i].z <= tr[i - 1].z);
    CHECK(std::abs(plateau - 1.2756) <= 1e-3);
  }

  TEST_CASE("global minimization") {
    auto tr = run_toy_global(33.5, 0.01, 2.0);
    CHECK(tr[0].z < -18.0);
    CHECK(std::abs(tr[0].z - (-18.891)) < 1e-2);
    auto em = run_toy_em(33.5, 0.01, 2.0, 20);
    // global energy never above the local scheme's at common times
    std::size_t k = 0;
    for (const auto& g : tr) {
      while (k + 1 < em.size() && em[k + 1].t <= g.t + 1e-12) ++k;
      if (std::abs(em[k].t - g.t) < 1e-12) CHECK(g.f_red <= em[k].f_red + 1e-9);
    }
  }

  TEST_CASE("viscous oracle limits") {
    auto frozen = viscous_oracle(33.5, 1e6, 0.001, 1.0, 0.0);
    for (const auto& r : frozen) CHECK(r.z == 33.5);
    auto stiff = viscous_oracle(33.5, 1e5, 0.01, 2.0);
    for (const auto& r : stiff) CHECK(r.dz < 0.05);
  }

  TEST_CASE("auglag z-step agrees with interval clamping") {
    rivet::auglag::Config cfg;
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dt(0.0, 2.0), dz(-20.0, 35.0), dr(0.001, 1.0);
    for (int i = 0; i < 300; ++i) {
      const double t = dt(rng), zp = dz(rng), rho = dr(rng);
      const double zs = zp - 0.3 * dr(rng);
      const auto u = toy_u_min(t, zs);
      const double ref = toy_z_min(t, u.u1, u.u2, zp - rho, zp);
      const auto r = toy_z_step_auglag(t, u.u1, u.u2, zp, rho, cfg);
      CHECK(std::abs(r.z - ref) <= 1e-8);
      CHECK(r.lambda1 >= 0.0);
      CHECK(r.lambda2 >= 0.0);
    }
  }

  TEST_CASE("driver with the auglag z-solver reproduces the clamped run") {
    rivet::em::Config cfg;
    cfg.rho = 0.01;
    cfg.t_end = 1.3;
    cfg.stag_tol = 1e-7;
    cfg.max_am_iters = 100000;
    Eigen::VectorXd z0(1), u0 = Eigen::VectorXd::Zero(2);
    z0 << 33.5;
    ToyProblem clamp;
    rivet::auglag::Config alcfg;
    alcfg.kkt_tol_feas_global = 1e-9 * cfg.rho;
    ToyProblem al(kDefaultLoad, ToyProblem::ZSolver::AugmentedLagrangian, alcfg);
    auto a = rivet::em::run_em(clamp, cfg, u0, z0);
    auto b = rivet::em::run_em(al, cfg, u0, z0);
    REQUIRE(a.steps.size() > 100);
    const std::size_t n = std::min(a.steps.size(), b.steps.size());
    for (std::size_t i = 0; i < n && a.steps[i].t < 1.1; ++i) {
      CHECK(std::abs(a.steps[i].t - b.steps[i].t) < 1e-9);
    }
    auto plateau = [](const rivet::em::Trajectory& tr) {
      for (const auto& r : tr.steps)
        if (r.dt < 1e-9 && r.t > 1.25) return r.t;
      return -1.0;
    };
    CHECK(std::abs(plateau(a) - plateau(b)) < 5e-3);
    CHECK(std::abs(a.final_state.z[0] - b.final_state.z[0]) < 1e-3);
    CHECK(a.final_state.z[0] < 0.0);
  }
}
