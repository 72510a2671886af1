#include <doctest.h>

#include <numbers>

#include "geometry_oracles.hpp"
#include "mvd/errors.hpp"
#include "mvd/geometry.hpp"

using namespace mvd;
using namespace mvd::test;
using std::numbers::pi;

namespace {

std::vector<double> tlog(const Manifold& m, std::span<const double> x, std::span<const double> y) {
  std::vector<double> v(static_cast<std::size_t>(m.dim()));
  TangentFrame(m, x).log(y, v);
  return v;
}

std::vector<double> texp(const Manifold& m, std::span<const double> x, std::span<const double> v) {
  std::vector<double> y(static_cast<std::size_t>(m.ambient_len()));
  TangentFrame(m, x).exp(v, y);
  return y;
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("distance examples") {
    CHECK(dist(Manifold::sphere2(), std::vector{1.0, 0.0, 0.0}, std::vector{0.0, 1.0, 0.0}) ==
          doctest::Approx(pi / 2).epsilon(1e-14));
    const double e = std::exp(1.0);
    CHECK(dist(Manifold::spd(2), std::vector{1.0, 0.0, 0.0, 1.0}, std::vector{e, 0.0, 0.0, e}) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
    CHECK(dist(Manifold::hyperbolic2(), std::vector{0.0, 0.0, 1.0}, std::vector{std::sinh(1.0), 0.0, std::cosh(1.0)}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    // Boundary limit of the simplex distance.
    CHECK(dist(Manifold::simplex1(), std::vector{1.0 - 1e-14, 1e-14}, std::vector{1e-14, 1.0 - 1e-14}) ==
          doctest::Approx(pi).epsilon(1e-6));
  }

  TEST_CASE("distance matches closed forms on random pairs") {
    std::mt19937_64 g(11);
    for (const Manifold& m : all_manifolds()) {
      CAPTURE(m.tag());
      for (int i = 0; i < 200; ++i) {
        const auto x = random_coords(m, g), y = random_coords(m, g);
        CHECK(dist(m, x, y) == doctest::Approx(oracle_dist(m, x, y)).epsilon(1e-9));
        CHECK(dist(m, x, x) == doctest::Approx(0.0).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("mismatched lengths raise ShapeError") {
    CHECK_THROWS_AS(dist(Manifold::sphere2(), std::vector{1.0, 0.0}, std::vector{1.0, 0.0, 0.0}), ShapeError);
    CHECK_THROWS_AS(dist(Point(Manifold::circle(), std::vector{1.0, 0.0}),
                         Point(Manifold::sphere2(), std::vector{1.0, 0.0, 0.0})),
                    ShapeError);
  }

  TEST_CASE("canonical bases") {
    SUBCASE("SPD(2) at the identity") {
      const auto b = TangentFrame(Manifold::spd(2), std::vector{1.0, 0.0, 0.0, 1.0}).basis();
      REQUIRE(b.size() == 3);
      const double s = 1.0 / std::sqrt(2.0);
      CHECK(max_abs_diff(b[0], std::vector{1.0, 0.0, 0.0, 0.0}) < 1e-15);
      CHECK(max_abs_diff(b[1], std::vector{0.0, 0.0, 0.0, 1.0}) < 1e-15);
      CHECK(max_abs_diff(b[2], std::vector{0.0, s, s, 0.0}) < 1e-15);
    }
    SUBCASE("circle") {
      const double t = 0.7;
      const auto b = TangentFrame(Manifold::circle(), std::vector{std::cos(t), std::sin(t)}).basis();
      CHECK(max_abs_diff(b[0], std::vector{-std::sin(t), std::cos(t)}) < 1e-15);
    }
    SUBCASE("sphere at the north pole") {
      const auto b = TangentFrame(Manifold::sphere2(), std::vector{0.0, 0.0, 1.0}).basis();
      CHECK(max_abs_diff(b[0], std::vector{1.0, 0.0, 0.0}) < 1e-15);
      CHECK(max_abs_diff(b[1], std::vector{0.0, 1.0, 0.0}) < 1e-15);
    }
    SUBCASE("basis is deterministic") {
      std::mt19937_64 g(3);
      for (const Manifold& m : all_manifolds()) {
        const auto x = random_coords(m, g);
        CHECK(TangentFrame(m, x).basis() == TangentFrame(m, x).basis());
      }
    }
  }

  TEST_CASE("Gram matrices are the identity") {
    std::mt19937_64 g(5);
    for (const Manifold& m : all_manifolds()) {
      CAPTURE(m.tag());
      double worst = 0.0;
      for (int i = 0; i < 100; ++i) {
        const auto x = random_coords(m, g);
        const auto b = TangentFrame(m, x).basis();
        for (std::size_t p = 0; p < b.size(); ++p)
          for (std::size_t q = 0; q < b.size(); ++q)
            worst = std::max(worst, std::abs(oracle_metric(m, x, b[p], b[q]) - (p == q ? 1.0 : 0.0)));
      }
      CHECK(worst < 1e-10);
    }
  }

  TEST_CASE("exp examples") {
    CHECK(max_abs_diff(texp(Manifold::sphere2(), std::vector{0.0, 0.0, 1.0}, std::vector{pi / 2, 0.0}),
                       std::vector{1.0, 0.0, 0.0}) < 1e-15);
    const double e = std::exp(1.0);
    CHECK(max_abs_diff(texp(Manifold::spd(2), std::vector{1.0, 0.0, 0.0, 1.0}, std::vector{1.0, 1.0, 0.0}),
                       std::vector{e, 0.0, 0.0, e}) < 1e-14);
    // H^2 at the apex: exp(r e_k) traces x(alpha, r) = (cos a sinh r, sin a sinh r, cosh r).
    for (double r : {0.3, 1.0, 2.5}) {
      const double a = 0.9;
      const auto y = texp(Manifold::hyperbolic2(), std::vector{0.0, 0.0, 1.0}, std::vector{r * std::cos(a), r * std::sin(a)});
      CHECK(max_abs_diff(y, std::vector{std::cos(a) * std::sinh(r), std::sin(a) * std::sinh(r), std::cosh(r)}) < 1e-12);
    }
  }

  TEST_CASE("exp at zero and log at the base") {
    std::mt19937_64 g(9);
    for (const Manifold& m : all_manifolds()) {
      const auto x = random_coords(m, g);
      const std::vector<double> zero(static_cast<std::size_t>(m.dim()), 0.0);
      CHECK(texp(m, x, zero) == x);
      CHECK(norm(tlog(m, x, x)) < 1e-12);
    }
  }

  TEST_CASE("exp matches closed-form geodesics") {
    std::mt19937_64 g(21);
    for (const Manifold& m : all_manifolds()) {
      CAPTURE(m.tag());
      for (int i = 0; i < 200; ++i) {
        const auto x = random_coords(m, g);
        const auto v = random_tangent(m, x, g);
        CHECK(max_abs_diff(texp(m, x, v), oracle_exp(m, x, ambient_tangent(m, x, v))) < 1e-9);
      }
    }
  }

  TEST_CASE("radial isometry and round trips") {
    std::mt19937_64 g(23);
    for (const Manifold& m : all_manifolds()) {
      CAPTURE(m.tag());
      for (int i = 0; i < 300; ++i) {
        const auto x = random_coords(m, g);
        const auto v = random_tangent(m, x, g);
        const auto y = texp(m, x, v);
        CHECK(validate(m, y));
        CHECK(dist(m, x, y) == doctest::Approx(norm(v)).epsilon(1e-9));
        CHECK(max_abs_diff(tlog(m, x, y), v) < 1e-9);
        const auto z = random_coords(m, g);
        const auto w = tlog(m, x, z);
        CHECK(norm(w) == doctest::Approx(dist(m, x, z)).epsilon(1e-10));
        CHECK(max_abs_diff(texp(m, x, w), z) < 1e-9);
      }
    }
  }

  TEST_CASE("sphere cut locus fails loudly") {
    const Manifold s2 = Manifold::sphere2();
    CHECK_THROWS_AS(tlog(s2, std::vector{1.0, 0.0, 0.0}, std::vector{-1.0, 0.0, 0.0}), CutLocusError);
    CHECK_THROWS_AS(tlog(Manifold::circle(), std::vector{0.0, 1.0}, std::vector{0.0, -1.0}), CutLocusError);
    // Just inside the threshold <x, y> > -1 + 1e-12 the log is defined.
    const double a = pi - 1e-5;
    const auto v = tlog(s2, std::vector{1.0, 0.0, 0.0}, std::vector{std::cos(a), std::sin(a), 0.0});
    CHECK(norm(v) == doctest::Approx(a).epsilon(1e-9));
    // Within the slack it is rejected.
    const double b = pi - 1e-7;
    CHECK_THROWS_AS(tlog(s2, std::vector{1.0, 0.0, 0.0}, std::vector{std::cos(b), std::sin(b), 0.0}), CutLocusError);
  }

  TEST_CASE("simplex exp leaving the open simplex is a domain error") {
    const std::vector<double> x{0.5, 0.5};
    CHECK_THROWS_AS(texp(Manifold::simplex1(), x, std::vector{pi / 2}), DomainError);
    CHECK_THROWS_AS(texp(Manifold::simplex1(), x, std::vector{-pi / 2}), DomainError);
    CHECK_NOTHROW(texp(Manifold::simplex1(), x, std::vector{pi / 2 - 0.1}));
    // Past the boundary the geodesic folds back into the simplex.
    const auto y = texp(Manifold::simplex1(), x, std::vector{-pi / 2 - 0.1});
    CHECK(simplex_angle(y) == doctest::Approx(pi - 0.1).epsilon(1e-12));
  }

  TEST_CASE("SPD exp and log at the identity match matrix functions") {
    std::mt19937_64 g(31);
    std::normal_distribution<double> n;
    for (int r = 2; r <= 3; ++r) {
      const Manifold m = Manifold::spd(r);
      const auto id = from_matrix(Eigen::MatrixXd::Identity(r, r));
      for (int i = 0; i < 50; ++i) {
        std::vector<double> v(static_cast<std::size_t>(m.dim()));
        for (double& c : v) c = 0.6 * n(g);
        const Eigen::MatrixXd va = as_matrix(ambient_tangent(m, id, v), r);
        CHECK(max_abs_diff(texp(m, id, v), from_matrix(va.exp())) < 1e-11);
        const auto y = random_coords(m, g);
        const Eigen::MatrixXd l = as_matrix(y, r).log();
        const auto w = tlog(m, id, y);
        CHECK(max_abs_diff(ambient_tangent(m, id, w), from_matrix(l)) < 1e-11);
      }
    }
  }

  TEST_CASE("SPD log of a non positive definite argument is a domain error") {
    CHECK_THROWS_AS(tlog(Manifold::spd(2), std::vector{1.0, 0.0, 0.0, 1.0}, std::vector{1.0, 2.0, 2.0, 1.0}), DomainError);
  }

  TEST_CASE("hyperbolic volume factor r / sinh r") {
    // Jacobian of x -> log_mu(x) measured in orthonormal frames at x.
    const Manifold h2 = Manifold::hyperbolic2();
    const std::vector<double> mu{0.0, 0.0, 1.0};
    const TangentFrame at_mu(h2, mu);
    for (double r : {0.2, 0.8, 1.5, 2.5}) {
      const double a = 0.4;
      const auto x = texp(h2, mu, std::vector{r * std::cos(a), r * std::sin(a)});
      const TangentFrame at_x(h2, x);
      const double h = 1e-5;
      Eigen::Matrix2d jac;
      for (int k = 0; k < 2; ++k) {
        std::vector<double> e(2, 0.0), yp(3), ym(3), lp(2), lm(2);
        e[static_cast<std::size_t>(k)] = h;
        at_x.exp(e, yp);
        e[static_cast<std::size_t>(k)] = -h;
        at_x.exp(e, ym);
        at_mu.log(yp, lp);
        at_mu.log(ym, lm);
        jac(0, k) = (lp[0] - lm[0]) / (2 * h);
        jac(1, k) = (lp[1] - lm[1]) / (2 * h);
      }
      CHECK(std::abs(jac.determinant()) == doctest::Approx(r / std::sinh(r)).epsilon(1e-6));
    }
  }

  TEST_CASE("cached distance agrees with sq_dist") {
    std::mt19937_64 g(41);
    for (const Manifold& m : all_manifolds()) {
      for (int i = 0; i < 50; ++i) {
        const auto x = random_coords(m, g), y = random_coords(m, g);
        CHECK(TangentFrame(m, x).sq_dist_to(y) == doctest::Approx(sq_dist(m, x, y)).epsilon(1e-12));
      }
    }
  }
}
