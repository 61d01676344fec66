#include <cmath>
#include <random>

#include "auglag/auglag.hpp"
#include "fem/mesh.hpp"
#include "norms/norms.hpp"
#include "doctest.h"

using namespace rivet;
using norms::NormSpec;

namespace {

fem::Discretization grid(int nx, int ny, bool tri = false, double w = 1.0, double h = 1.0) {
  return fem::Discretization(fem::structured_rectangle(0, 0, w, h, nx, ny, tri));
}

Eigen::VectorXd random_field(int n, unsigned seed, double lo, double hi) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = d(gen);
  return v;
}

// Bilinear interpolation of nodal values on a structured grid, integrated
// with a 5x5 Gauss-Legendre rule per cell.
double oracle_l2_squared(const Eigen::VectorXd& v, int nx, int ny, double w, double h) {
  const double x5[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                        0.9061798459386640};
  const double w5[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                        0.4786286704993665, 0.2369268850561891};
  const double hx = w / nx, hy = h / ny;
  auto node = [&](int i, int j) { return v[j * (nx + 1) + i]; };
  double s = 0.0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      for (int a = 0; a < 5; ++a) {
        for (int b = 0; b < 5; ++b) {
          const double xi = 0.5 * (x5[a] + 1.0), et = 0.5 * (x5[b] + 1.0);
          const double val = node(i, j) * (1 - xi) * (1 - et) + node(i + 1, j) * xi * (1 - et) +
                             node(i + 1, j + 1) * xi * et + node(i, j + 1) * (1 - xi) * et;
          s += 0.25 * w5[a] * w5[b] * hx * hy * val * val;
        }
      }
    }
  }
  return s;
}

double l2_value(const Eigen::VectorXd& dz, const fem::Discretization& d, const NormSpec& spec,
                double lambda2, double alpha2, double rho) {
  const double g = norms::norm_value(dz, d, spec) - rho;
  return auglag::global_term(g, lambda2, alpha2).value;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

}  // namespace

TEST_SUITE("norms") {
  TEST_CASE("node numbering of the structured grid is row major") {
    const auto m = fem::structured_rectangle(0, 0, 1, 1, 2, 2);
    CHECK(m.nodes[3].x() == doctest::Approx(0.0));
    CHECK(m.nodes[3].y() == doctest::Approx(0.5));
  }

  TEST_CASE("zero increment has zero norm") {
    const auto d = grid(3, 3);
    for (const auto& spec : {NormSpec::lp(2), NormSpec::lp(4), NormSpec::h1()}) {
      CHECK(norms::norm_value(Eigen::VectorXd::Zero(d.num_nodes()), d, spec) == 0.0);
    }
  }

  TEST_CASE("constant increment on a unit square") {
    for (bool tri : {false, true}) {
      const auto d = grid(3, 2, tri);
      const Eigen::VectorXd c = Eigen::VectorXd::Constant(d.num_nodes(), -0.3);
      for (int p : {2, 3, 4, 6}) CHECK(norms::norm_value(c, d, NormSpec::lp(p)) == doctest::Approx(0.3).epsilon(1e-13));
      CHECK(norms::norm_value(c, d, NormSpec::h1()) == doctest::Approx(0.3).epsilon(1e-13));
      CHECK(norms::integral_S(c, d, NormSpec::lp(2)) ==
            doctest::Approx(norms::integral_S(c, d, NormSpec::h1())).epsilon(1e-13));
    }
  }

  TEST_CASE("L2 norm matches an independent quadrature") {
    const int nx = 2, ny = 2;
    const double w = 1.3, h = 0.7;
    const auto d = grid(nx, ny, false, w, h);
    for (unsigned seed = 1; seed <= 5; ++seed) {
      const Eigen::VectorXd v = random_field(d.num_nodes(), seed, -1.0, 1.0);
      const double S = norms::integral_S(v, d, NormSpec::lp(2));
      CHECK(std::abs(S - oracle_l2_squared(v, nx, ny, w, h)) < 1e-12);
    }
  }

  TEST_CASE("norms are absolutely homogeneous") {
    const auto d = grid(3, 3);
    const Eigen::VectorXd v = random_field(d.num_nodes(), 7, -0.5, 0.0);
    for (const auto& spec : {NormSpec::lp(2), NormSpec::lp(4), NormSpec::lp(5), NormSpec::h1()}) {
      const double n1 = norms::norm_value(v, d, spec);
      for (double c : {-3.0, 0.25, 7.5}) {
        CHECK(rel_err(norms::norm_value(c * v, d, spec), std::abs(c) * n1) < 1e-12);
      }
    }
  }

  TEST_CASE("one element, constant drop, p = 2") {
    const auto d = grid(1, 1);
    const double dd = 0.2, rho = 0.05;
    const auto q = norms::lp_quantities(Eigen::VectorXd::Constant(4, -dd), d, 2, 0.0, 10.0, rho, 0.0);
    CHECK(q.S == doctest::Approx(dd * dd).epsilon(1e-14));
    CHECK(q.g == doctest::Approx(dd - rho).epsilon(1e-14));
    const auto h = norms::h1_quantities(Eigen::VectorXd::Constant(4, -dd), d, 0.0, 10.0, rho, 0.0);
    CHECK(h.S == doctest::Approx(dd * dd).epsilon(1e-14));
    CHECK(h.g == doctest::Approx(dd - rho).epsilon(1e-14));
  }

  TEST_CASE("inactive constraint contributes nothing") {
    const auto d = grid(3, 3);
    const double rho = 0.5;
    SUBCASE("zero increment") {
      const Eigen::VectorXd z0 = Eigen::VectorXd::Zero(d.num_nodes());
      for (const auto& spec : {NormSpec::lp(2), NormSpec::lp(4), NormSpec::h1()}) {
        const auto q = norms::quantities(z0, d, spec, 0.0, 100.0, rho);
        CHECK(q.S == 0.0);
        CHECK(q.g == doctest::Approx(-rho));
        CHECK(q.b == 0.0);
        CHECK(q.ksp_scale == 0.0);
        CHECK(q.residual_scale == 0.0);
        CHECK(q.fz.norm() == 0.0);
      }
    }
    SUBCASE("small increment, zero multiplier") {
      const Eigen::VectorXd v = random_field(d.num_nodes(), 3, -0.01, 0.0);
      for (const auto& spec : {NormSpec::lp(2), NormSpec::lp(4), NormSpec::h1()}) {
        const auto q = norms::quantities(v, d, spec, 0.0, 100.0, rho);
        CHECK(q.g < 0.0);
        CHECK(q.b == 0.0);
        CHECK(q.ksp_scale == 0.0);
        CHECK(q.residual_scale == 0.0);
      }
    }
  }

  TEST_CASE("floor keeps the scalars finite at S = 0 with an active multiplier") {
    const auto d = grid(2, 2);
    const Eigen::VectorXd z0 = Eigen::VectorXd::Zero(d.num_nodes());
    for (const auto& spec : {NormSpec::lp(4), NormSpec::h1()}) {
      const auto q = norms::quantities(z0, d, spec, 5.0, 10.0, 0.01);
      CHECK(q.regularized);
      CHECK(std::isfinite(q.b));
      CHECK(std::isfinite(q.ksp_scale));
      CHECK(std::isfinite(q.residual_scale));
    }
    CHECK(NormSpec::lp(4).floor_for(0.01) == doctest::Approx(std::pow(1e-10, 4)));
    CHECK(NormSpec::h1().floor_for(0.01) == doctest::Approx(1e-20));
  }

  TEST_CASE("gradient of S matches finite differences") {
    for (bool tri : {false, true}) {
      const auto d = grid(3, 3, tri);
      const Eigen::VectorXd v = random_field(d.num_nodes(), 11, -0.4, 0.1);
      for (const auto& spec : {NormSpec::lp(2), NormSpec::lp(3), NormSpec::lp(4), NormSpec::h1()}) {
        const auto q = norms::quantities(v, d, spec, 0.0, 1.0, 1.0);
        for (int a = 0; a < d.num_nodes(); ++a) {
          const double h = 1e-6;
          Eigen::VectorXd vp = v, vm = v;
          vp[a] += h;
          vm[a] -= h;
          const double fd = (norms::integral_S(vp, d, spec) - norms::integral_S(vm, d, spec)) / (2 * h);
          CHECK(rel_err(q.fz[a], fd) < 1e-6);
        }
      }
    }
  }

  TEST_CASE("residual contribution is the gradient of the global penalty term") {
    const auto d = grid(3, 3);
    const Eigen::VectorXd v = random_field(d.num_nodes(), 5, -0.3, 0.0);
    const double rho = 0.05, lambda2 = 0.7, alpha2 = 40.0;
    for (const auto& spec : {NormSpec::lp(2), NormSpec::lp(4), NormSpec::h1()}) {
      const auto q = norms::quantities(v, d, spec, lambda2, alpha2, rho);
      REQUIRE(lambda2 + alpha2 * q.g > 0.0);
      const Eigen::VectorXd r = q.residual_scale * q.fz;
      for (int a = 0; a < d.num_nodes(); ++a) {
        const double h = 1e-6;
        Eigen::VectorXd vp = v, vm = v;
        vp[a] += h;
        vm[a] -= h;
        const double fd = (l2_value(vp, d, spec, lambda2, alpha2, rho) -
                           l2_value(vm, d, spec, lambda2, alpha2, rho)) /
                          (2 * h);
        CHECK(rel_err(r[a], fd) < 1e-6);
      }
    }
  }

  TEST_CASE("rank-1 plus sparse tangent is the Hessian of the global penalty term") {
    const auto d = grid(2, 3);
    const Eigen::VectorXd v = random_field(d.num_nodes(), 9, -0.3, -0.05);
    const double rho = 0.05, lambda2 = 0.7, alpha2 = 40.0;
    for (const auto& spec : {NormSpec::lp(2), NormSpec::lp(4), NormSpec::lp(6), NormSpec::h1()}) {
      const auto q = norms::quantities(v, d, spec, lambda2, alpha2, rho);
      std::vector<Eigen::Triplet<double>> trip;
      norms::add_sparse_tangent(trip, v, d, spec, q.ksp_scale);
      Eigen::SparseMatrix<double> Ks(d.num_nodes(), d.num_nodes());
      Ks.setFromTriplets(trip.begin(), trip.end());
      const Eigen::MatrixXd K = Eigen::MatrixXd(Ks) + q.b * q.fz * q.fz.transpose();
      const double h = 1e-6;
      for (int a = 0; a < d.num_nodes(); ++a) {
        Eigen::VectorXd vp = v, vm = v;
        vp[a] += h;
        vm[a] -= h;
        const auto qp = norms::quantities(vp, d, spec, lambda2, alpha2, rho);
        const auto qm = norms::quantities(vm, d, spec, lambda2, alpha2, rho);
        const Eigen::VectorXd col = (qp.residual_scale * qp.fz - qm.residual_scale * qm.fz) / (2 * h);
        CHECK((K.col(a) - col).norm() < 1e-4 * col.norm());
      }
    }
  }

  TEST_CASE("invalid specs are rejected") {
    CHECK_THROWS(NormSpec::lp(1).validate());
    NormSpec s = NormSpec::lp(4);
    s.s_floor = -1.0;
    CHECK_THROWS(s.validate());
    CHECK(NormSpec::lp(4).name() == "L4");
    CHECK(NormSpec::h1().name() == "H1");
  }
}
