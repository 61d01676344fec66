#include <Eigen/Core>
#include <cmath>
#include <random>

#include "auglag/auglag.hpp"
#include "core/error.hpp"
#include "doctest.h"

using namespace rivet;
using namespace rivet::auglag;

namespace {

// The multiplier-method term written out independently.
double term_value_oracle(double c, double lambda, double alpha) {
  const double s = lambda + alpha * c;
  return s > 0.0 ? (s * s - lambda * lambda) / (2.0 * alpha) : -lambda * lambda / (2.0 * alpha);
}

}  // namespace

TEST_SUITE("auglag") {
  TEST_CASE("nodal term examples") {
    auto a = nodal_term(-0.5, 0.0, 10.0);
    CHECK(a.value == 0.0);
    CHECK(a.d1 == 0.0);
    CHECK(a.d2 == 0.0);

    auto b = nodal_term(0.1, 0.0, 10.0);
    CHECK(b.value == doctest::Approx(0.05).epsilon(1e-14));
    CHECK(b.d1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b.d2 == 10.0);
    const double h = 1e-6;
    const double fd = (nodal_term(0.1 + h, 0.0, 10.0).value - nodal_term(0.1 - h, 0.0, 10.0).value) /
                      (2 * h);
    CHECK(fd == doctest::Approx(b.d1).epsilon(1e-8));

    auto c = nodal_term(0.0, 2.0, 10.0);
    CHECK(c.value == 0.0);
    CHECK(c.d1 == 2.0);
    CHECK(c.d2 == 10.0);
  }

  TEST_CASE("global term examples") {
    const double rho = 0.01;
    auto a = global_term(-rho, 0.0, 100.0);
    CHECK(a.value == 0.0);
    CHECK(a.d1 == 0.0);
    CHECK(a.d2 == 0.0);

    auto b = global_term(0.01, 0.0, 100.0);
    CHECK(b.value == doctest::Approx(0.005).epsilon(1e-14));
    CHECK(b.d1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b.d2 == 100.0);
    const double h = 1e-7;
    const double fd =
        (global_term(0.01 + h, 0.0, 100.0).value - global_term(0.01 - h, 0.0, 100.0).value) / (2 * h);
    CHECK(fd == doctest::Approx(1.0).epsilon(1e-7));

    auto c = global_term(0.0, 5.0, 100.0);
    CHECK(c.value == 0.0);
    CHECK(c.d1 == 5.0);
    CHECK(c.d2 == 100.0);
  }

  TEST_CASE("non-positive penalty is rejected") {
    CHECK_THROWS_AS(nodal_term(0.1, 0.0, 0.0), Error);
    CHECK_THROWS_AS(global_term(0.1, 0.0, -1.0), Error);
    try {
      nodal_term(0.0, 0.0, 0.0);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidArgument);
    }
  }

  TEST_CASE("hestenes-powell examples") {
    CHECK(hestenes_powell(0.0, 10.0, -1.0) == 0.0);
    CHECK(hestenes_powell(3.0, 10.0, 0.2) == doctest::Approx(5.0));
    CHECK(hestenes_powell(1.0, 10.0, -0.2) == 0.0);
  }

  TEST_CASE("penalty update examples") {
    Config cfg;
    CHECK(penalty_update(10.0, 0.9, 1.0, cfg) == 100.0);
    CHECK(penalty_update(10.0, 0.1, 1.0, cfg) == 10.0);
    CHECK(penalty_update(1e12, 5.0, 1.0, cfg) == 1e12);
    CHECK(penalty_update(1e11, 5.0, 1.0, cfg) == 1e12);
  }

  TEST_CASE("kkt examples") {
    Eigen::VectorXd c = Eigen::VectorXd::Constant(4, -1.0);
    Eigen::VectorXd l = Eigen::VectorXd::Zero(4);
    CHECK(kkt_satisfied(c, l, 1e-8, 1e-9));
    c[2] = 1e-3;
    CHECK_FALSE(kkt_satisfied(c, l, 1e-8, 1e-9));
    Eigen::VectorXd c0 = Eigen::VectorXd::Zero(1);
    Eigen::VectorXd l7 = Eigen::VectorXd::Constant(1, 7.0);
    CHECK(kkt_satisfied(c0, l7, 1e-8, 1e-9));
    Eigen::VectorXd cm = Eigen::VectorXd::Constant(1, -0.5);
    CHECK_FALSE(kkt_satisfied(cm, l7, 1e-8, 1e-9));
  }

  TEST_CASE("derivative matches finite differences away from the kink") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uc(-1.0, 1.0), ul(0.0, 5.0), ua(0.5, 100.0);
    int checked = 0;
    for (int i = 0; i < 2000; ++i) {
      const double c = uc(rng), lam = ul(rng), alpha = ua(rng);
      const double s = lam + alpha * c;
      if (std::abs(s) < 1e-3) continue;
      const double h = 1e-6 * std::max(1.0, std::abs(c));
      const auto v = nodal_term(c, lam, alpha);
      CHECK(v.value == doctest::Approx(term_value_oracle(c, lam, alpha)).epsilon(1e-12));
      const double fd =
          (nodal_term(c + h, lam, alpha).value - nodal_term(c - h, lam, alpha).value) / (2 * h);
      if (v.d1 == 0.0) {
        CHECK(std::abs(fd) < 1e-8);
      } else {
        CHECK(std::abs(fd - v.d1) <= 1e-6 * std::abs(v.d1));
      }
      ++checked;
    }
    CHECK(checked > 1500);
  }

  TEST_CASE("continuity across the kink") {
    const double lam = 2.0, alpha = 10.0;
    const double kink = -lam / alpha;
    const double e = 1e-12;
    const auto left = nodal_term(kink - e, lam, alpha);
    const auto right = nodal_term(kink + e, lam, alpha);
    CHECK(std::abs(left.value - right.value) < 1e-10);
    CHECK(std::abs(left.d1 - right.d1) < 1e-9);
    CHECK(left.d2 == 0.0);
    CHECK(right.d2 == alpha);
    CHECK(nodal_term(kink, lam, alpha).d2 == alpha);
  }

  TEST_CASE("updated multiplier equals the term slope and is nonnegative") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> uc(-1.0, 1.0), ul(0.0, 5.0), ua(0.5, 100.0);
    for (int i = 0; i < 500; ++i) {
      const double c = uc(rng), lam = ul(rng), alpha = ua(rng);
      const double next = hestenes_powell(lam, alpha, c);
      CHECK(next >= 0.0);
      CHECK(next == nodal_term(c, lam, alpha).d1);
    }
  }

  TEST_CASE("feasible point with zero multipliers adds nothing") {
    for (double c : {-3.0, -0.1, -1e-9, 0.0}) {
      CHECK(nodal_term(c, 0.0, 7.0).value == 0.0);
      CHECK(global_term(c, 0.0, 7.0).value == 0.0);
    }
  }

  TEST_CASE("fresh state and config validation") {
    Config cfg;
    auto s = State::fresh(5, cfg);
    CHECK(s.lambda1.size() == 5);
    CHECK(s.lambda1.isZero());
    CHECK((s.alpha1.array() == cfg.alpha1_init).all());
    CHECK(s.alpha2 == cfg.alpha2_init);
    CHECK_NOTHROW(cfg.validate());
    Config bad = cfg;
    bad.growth = 1.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = cfg;
    bad.sufficient_decrease = 1.5;
    CHECK_THROWS_AS(bad.validate(), Error);
  }
}
