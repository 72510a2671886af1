#include <doctest.h>

#include <numbers>

#include "geometry_oracles.hpp"
#include "mvd/errors.hpp"
#include "mvd/geometry.hpp"

using namespace mvd;
using namespace mvd::test;
using std::numbers::pi;

namespace {

ProductPoint random_product(const Manifold& m, std::size_t count, std::mt19937_64& g) {
  ProductPoint p(m, count);
  for (std::size_t j = 0; j < count; ++j) {
    const auto c = random_coords(m, g);
    std::copy(c.begin(), c.end(), p.component(j).begin());
  }
  return p;
}

}  // namespace

TEST_SUITE("manifold") {
  TEST_CASE("descriptor table") {
    struct Row {
      Manifold m;
      int dim, amb;
      const char* tag;
    };
    const Row rows[] = {{Manifold::euclidean(3), 3, 3, "eucl:3"}, {Manifold::circle(), 1, 2, "s1"},
                        {Manifold::sphere2(), 2, 3, "s2"},        {Manifold::spd(2), 3, 4, "spd:2"},
                        {Manifold::spd(3), 6, 9, "spd:3"},        {Manifold::simplex1(), 1, 2, "simplex:1"},
                        {Manifold::hyperbolic2(), 2, 3, "h2"}};
    for (const Row& r : rows) {
      CHECK(r.m.dim() == r.dim);
      CHECK(r.m.ambient_len() == r.amb);
      CHECK(r.m.tag() == r.tag);
      CHECK(Manifold::from_tag(r.tag) == r.m);
    }
    CHECK_THROWS_AS(Manifold::from_tag("s3"), ShapeError);
    CHECK_THROWS_AS(Manifold::from_tag("spd:4"), ShapeError);
    CHECK_THROWS_AS(Manifold::from_tag("eucl:"), ShapeError);
  }

  TEST_CASE("validate") {
    CHECK(validate(Manifold::sphere2(), std::vector{1.0, 0.0, 0.0}));
    CHECK_FALSE(validate(Manifold::spd(2), std::vector{1.0, 2.0, 2.0, 1.0}));
    CHECK(validate(Manifold::simplex1(), std::vector{0.3, 0.7}));
    CHECK_FALSE(validate(Manifold::simplex1(), std::vector{0.0, 1.0}));
    CHECK_FALSE(validate(Manifold::simplex1(), std::vector{0.3, 0.71}));
    CHECK_FALSE(validate(Manifold::sphere2(), std::vector{1.0 + 1e-9, 0.0, 0.0}));
    CHECK_FALSE(validate(Manifold::circle(), std::vector{1.0, 0.0, 0.0}));
    CHECK_FALSE(validate(Manifold::spd(2), std::vector{1.0, 0.1, 0.0, 1.0}));
    CHECK(validate(Manifold::hyperbolic2(), std::vector{std::sinh(1.0), 0.0, std::cosh(1.0)}));
    CHECK_FALSE(validate(Manifold::hyperbolic2(), std::vector{0.0, 0.0, -1.0}));
    CHECK_FALSE(validate(Manifold::euclidean(1), std::vector{std::nan("")}));
  }

  TEST_CASE("product distance") {
    const Manifold s2 = Manifold::sphere2();
    ProductPoint a(s2, 2, {1.0, 0.0, 0.0, 0.0, 0.0, 1.0});
    ProductPoint b(s2, 2, {0.0, 1.0, 0.0, 1.0, 0.0, 0.0});
    CHECK(product_dist(a, b) == doctest::Approx(pi / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(product_dist(a, a) == 0.0);

    std::mt19937_64 g(2);
    const Manifold spd2 = Manifold::spd(2);
    for (int i = 0; i < 20; ++i) {
      const ProductPoint x = random_product(spd2, 4, g), y = random_product(spd2, 4, g);
      double s = 0.0;
      for (std::size_t j = 0; j < 4; ++j) s += std::pow(oracle_dist(spd2, x.component(j), y.component(j)), 2);
      CHECK(product_dist(x, y) == doctest::Approx(std::sqrt(s)).epsilon(1e-10));
      CHECK(product_dist(x, y) == product_dist(y, x));
    }
    CHECK_THROWS_AS(product_dist(ProductPoint(s2, 2, a.coords), ProductPoint(s2, 1, {1.0, 0.0, 0.0})), ShapeError);
  }

  TEST_CASE("product exp and log") {
    std::mt19937_64 g(4);
    for (const Manifold& m : all_manifolds()) {
      CAPTURE(m.tag());
      const ProductPoint base = random_product(m, 4, g);
      const std::vector<double> zero(base.tangent_dim(), 0.0);
      CHECK(product_exp(base, zero).coords == base.coords);
      CHECK(norm(product_log(base, base)) < 1e-12);
      for (int i = 0; i < 20; ++i) {
        std::vector<double> v;
        for (std::size_t j = 0; j < 4; ++j) {
          const auto vj = random_tangent(m, base.component(j), g);
          v.insert(v.end(), vj.begin(), vj.end());
        }
        const ProductPoint q = product_exp(base, v);
        CHECK(max_abs_diff(product_log(base, q), v) < 1e-9);
        // Isometry of log coordinates.
        const ProductPoint r = random_product(m, 4, g);
        const double d = product_dist(base, r);
        CHECK(norm(product_log(base, r)) == doctest::Approx(d).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("cut locus error carries the component index") {
    const Manifold s2 = Manifold::sphere2();
    ProductPoint a(s2, 3, {1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0});
    ProductPoint b(s2, 3, {1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0});
    try {
      product_log(a, b);
      FAIL("expected a cut-locus error");
    } catch (const CutLocusError& e) {
      CHECK(e.index() == 2);
    }
  }

  TEST_CASE("triangle inequality") {
    std::mt19937_64 g(6);
    for (const Manifold& m : all_manifolds()) {
      for (int i = 0; i < 100; ++i) {
        const ProductPoint a = random_product(m, 3, g), b = random_product(m, 3, g), c = random_product(m, 3, g);
        CHECK(product_dist(a, c) <= product_dist(a, b) + product_dist(b, c) + 1e-9);
      }
    }
  }
}
