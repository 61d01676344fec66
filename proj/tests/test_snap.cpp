#include <boost/math/tools/roots.hpp>
#include <cmath>

#include "doctest.h"
#include "toy/toy.hpp"

using namespace rivet::toy;

namespace {

// Fold oracle: Newton on the system (E'(u) + F = 0 at F = 0 offset, E'' = 0) solved
// by bracketing E'' alone with finite differences of E'.
double d2_fd(double u) {
  const double h = 1e-5;
  return (snap_energy_du(u + h, 0.0) - snap_energy_du(u - h, 0.0)) / (2 * h);
}

}  // namespace

TEST_SUITE("snap") {
  TEST_CASE("energy examples") {
    CHECK(snap_energy(0.0, 0.0) == 0.0);
    CHECK(std::abs(snap_energy(2.0, 0.0)) < 1e-15);
    const double s2 = std::sqrt(2.0);
    CHECK(snap_energy(1.0, 0.0) == doctest::Approx((1 - s2) * (1 - s2) / s2).epsilon(1e-14));
    CHECK(snap_energy(1.0, 0.0) == doctest::Approx(0.121320).epsilon(1e-6));
    for (double u = -1.0; u <= 3.0; u += 0.013) {
      CHECK(std::abs(snap_energy(u, 0.0) - snap_energy(2.0 - u, 0.0)) <= 1e-12);
    }
  }

  TEST_CASE("derivatives match finite differences") {
    for (double u = -0.9; u <= 2.9; u += 0.1) {
      const double h = 1e-6;
      const double fd1 = (snap_energy(u + h, 0.3) - snap_energy(u - h, 0.3)) / (2 * h);
      const double fd2 = (snap_energy_du(u + h, 0.3) - snap_energy_du(u - h, 0.3)) / (2 * h);
      CHECK(fd1 == doctest::Approx(snap_energy_du(u, 0.3)).epsilon(1e-7).scale(1.0));
      CHECK(fd2 == doctest::Approx(snap_energy_du2(u)).epsilon(1e-7).scale(1.0));
    }
  }

  TEST_CASE("fold point agrees with a numerical oracle") {
    boost::uintmax_t it = 200;
    auto r = boost::math::tools::toms748_solve(d2_fd, 0.1, 0.9,
                                               boost::math::tools::eps_tolerance<double>(40), it);
    const double uf = 0.5 * (r.first + r.second);
    const double Ff = snap_energy_du(uf, 0.0);
    const Fold fold = snap_fold();
    CHECK(fold.u == doctest::Approx(uf).epsilon(1e-8));
    CHECK(fold.F == doctest::Approx(Ff).epsilon(1e-8));
    CHECK(fold.u == doctest::Approx(0.49018).epsilon(1e-4));
    CHECK(fold.F == doctest::Approx(0.187403).epsilon(1e-5));
  }

  TEST_CASE("all drivers agree in tension") {
    SnapSchedule s{-0.1, 0.0};
    const double u0 = snap_equilibrium(-0.1);
    auto em = run_snap_em(s, 0.01, u0, 0.2);
    auto lo = run_snap_local(s, 0.01, u0, 0.2);
    auto gl = run_snap_global(s, 0.01, u0, 0.2);
    CHECK(std::abs(em.back().u - u0) < 1e-9);
    CHECK(std::abs(lo.back().u - u0) < 1e-9);
    CHECK(std::abs(gl.back().u - u0) < 1e-7);
  }

  TEST_CASE("global snaps for infinitesimal compression while local holds") {
    SnapSchedule s{1e-4, 0.0};
    const double u0 = snap_equilibrium(-0.1);
    auto gl = run_snap_global(s, 0.01, u0, 0.02);
    auto lo = run_snap_local(s, 0.01, u0, 0.02);
    auto em = run_snap_em(s, 0.01, u0, 0.05);
    CHECK(gl.back().u > 1.9);
    CHECK(lo.back().u < 0.01);
    CHECK(em.back().u < 0.01);
  }

  TEST_CASE("E&M resolves the snap at frozen time with few Newton iterations") {
    SnapSchedule s;
    const double u0 = snap_equilibrium(s(0.0));
    auto em = run_snap_em(s, 0.01, u0, 1.6);
    const Fold fold = snap_fold();
    auto census = newton_iteration_census(em);
    int mx = 0;
    for (int c : census) mx = std::max(mx, c);
    CHECK(mx <= 15);
    // frozen steps form one contiguous block, all beyond the critical force
    int first = -1, last = -1, count = 0;
    for (const auto& r : em) {
      if (r.dt <= 1e-12) {
        if (first < 0) first = r.step;
        last = r.step;
        ++count;
        CHECK(r.F > fold.F);
      }
    }
    CHECK(count >= 5);
    CHECK(last - first + 1 == count);
    CHECK(em.back().u > 2.0);
    for (const auto& r : em) CHECK(r.converged);
  }

  TEST_CASE("naive local Newton spikes at the snap") {
    SnapSchedule s;
    const double u0 = snap_equilibrium(s(0.0));
    auto lo = run_snap_local(s, 0.01, u0, 1.6);
    CHECK(lo.size() == 161);
    int mx = 0;
    bool diverged = false;
    for (const auto& r : lo) {
      mx = std::max(mx, r.newton_iters);
      diverged = diverged || !r.converged;
    }
    CHECK((mx >= 50 || diverged));
  }
}
