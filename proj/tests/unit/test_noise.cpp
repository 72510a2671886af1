#include <doctest.h>

#include <numbers>

#include "geometry_oracles.hpp"
#include "mvd/denoise.hpp"
#include "mvd/errors.hpp"
#include "mvd/noise.hpp"
#include "mvd/synthetic.hpp"

using namespace mvd;
using namespace mvd::test;
using std::numbers::pi;

namespace {

double gauss(double x, double var) { return std::exp(-x * x / (2 * var)) / std::sqrt(2 * pi * var); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST_SUITE("noise") {
  TEST_CASE("counter RNG is keyed by seed, stream and draw") {
    CounterRng a(5, 3), b(5, 3), c(5, 4), d(6, 3);
    for (int i = 0; i < 10; ++i) {
      const auto x = a.next_u64();
      CHECK(x == b.next_u64());
      CHECK(x != c.next_u64());
      CHECK(x != d.next_u64());
    }
    CounterRng u(1, 1);
    for (int i = 0; i < 1000; ++i) {
      const double v = u.uniform();
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
    // Draw c of stream (seed, k): mix(key + (c + 1) * golden) with key = mix(seed ^ mix(k + golden)).
    const std::uint64_t golden = 0x9E3779B97F4A7C15ULL;
    const std::uint64_t key = splitmix64_mix(42 ^ splitmix64_mix(7 + golden));
    CounterRng r(42, 7);
    CHECK(r.next_u64() == splitmix64_mix(key + golden));
    CHECK(r.next_u64() == splitmix64_mix(key + 2 * golden));
  }

  TEST_CASE("lower factor") {
    CovMatrix c(3, 3);
    c << 4, 2, 0, 2, 2, 0, 0, 0, 0;
    const Eigen::MatrixXd a = lower_factor(c);
    CHECK((a * a.transpose() - c).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(a.isLowerTriangular());
    CovMatrix bad = c;
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(lower_factor(bad), ShapeError);
    CovMatrix indef(2, 2);
    indef << 1, 2, 2, 1;
    CHECK_THROWS_AS(lower_factor(indef), ShapeError);
  }

  TEST_CASE("zero covariance returns the mean") {
    std::mt19937_64 g(1);
    for (const Manifold& m : all_manifolds()) {
      const Point mu = random_point(m, g);
      CounterRng rng(1, 0);
      CHECK(sample_tangent_gaussian(mu, CovMatrix::Zero(m.dim(), m.dim()), rng).coords == mu.coords);
      CHECK(sample_tangent_gaussian(mu, 0.0, rng).coords == mu.coords);
    }
  }

  TEST_CASE("wrapped Gaussian on the circle") {
    const double var = 0.3;
    // Dyadic offsets keep t - t_mu exact, so the two calls see a and -a.
    CHECK(wrapped_gaussian_pdf_s1(0.5 + 0.75, 0.5, var) == wrapped_gaussian_pdf_s1(0.5 - 0.75, 0.5, var));
    CHECK(wrapped_gaussian_pdf_s1(1.3 + 2 * pi, 0.4, var) == doctest::Approx(wrapped_gaussian_pdf_s1(1.3, 0.4, var)).epsilon(1e-14));
    CHECK(simpson([&](double t) { return wrapped_gaussian_pdf_s1(t, 0.4, var); }, -pi, pi, 2048) ==
          doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(wrapped_gaussian_pdf_s1(0.2, 0.2, 0.01) - 3.98942280401) < 1e-6);
    CHECK_THROWS_AS(wrapped_gaussian_pdf_s1(0.0, 0.0, 0.0), DomainError);
  }

  TEST_CASE("log-normal on the half-line") {
    const double mu = 1.7, var = 0.2;
    CHECK(lognormal_pdf(mu, mu, var) == doctest::Approx(1.0 / std::sqrt(2 * pi * var)).epsilon(1e-14));
    // Substituting x = e^u turns dx/x into du.
    CHECK(simpson([&](double u) { return lognormal_pdf(std::exp(u), mu, var); }, std::log(mu) - 12, std::log(mu) + 12, 4096) ==
          doctest::Approx(1.0).epsilon(1e-8));
    CHECK(lognormal_pdf_lebesgue(2.0, mu, var) == doctest::Approx(lognormal_pdf(2.0, mu, var) / 2.0).epsilon(1e-15));
    CHECK_THROWS_AS(lognormal_pdf(0.0, mu, var), DomainError);
    CHECK_THROWS_AS(lognormal_pdf(1.0, -1.0, var), DomainError);
  }

  TEST_CASE("even shifted wrapped Gaussian on the simplex") {
    const double var = 0.4;
    for (double tmu : {0.3, 1.2, 2.9}) {
      CHECK(simpson([&](double t) { return simplex_pdf_delta1(t, tmu, var); }, 0.0 + 1e-300, pi - 1e-15, 4096) ==
            doctest::Approx(1.0).epsilon(1e-8));
      for (double t : {0.1, 0.9, 2.0, 3.0}) {
        double ref = 0.0;
        for (int j = -10; j <= 10; ++j) ref += gauss(t - tmu - 2 * pi * j, var) + gauss(t + tmu - 2 * pi * j, var);
        CHECK(simplex_pdf_delta1(t, tmu, var) == doctest::Approx(ref).epsilon(1e-13));
      }
    }
    const double small = 0.001;
    CHECK(simplex_pdf_delta1(pi / 2, pi / 2, small) == doctest::Approx(1.0 / std::sqrt(2 * pi * small)).epsilon(1e-12));
    CHECK_THROWS_AS(simplex_pdf_delta1(0.0, 1.0, var), DomainError);
    CHECK_THROWS_AS(simplex_pdf_delta1(pi, 1.0, var), DomainError);
  }

  TEST_CASE("hyperbolic radial density") {
    const double s = 0.6;
    CHECK(h2_radial_pdf(0.0, s) == doctest::Approx(1.0 / (2 * pi * s * s)).epsilon(1e-14));
    CHECK(simpson([&](double r) { return 2 * pi * h2_radial_pdf(r, s) * std::sinh(r); }, 0.0, 12 * s, 4096) ==
          doctest::Approx(1.0).epsilon(1e-8));
  }

  TEST_CASE("circle samples follow the wrapped Gaussian") {
    const double sigma = 0.2;
    const Point mu(Manifold::circle(), std::vector{1.0, 0.0});
    std::vector<double> t;
    for (std::uint64_t k = 0; k < 10000; ++k) {
      CounterRng rng(3, k);
      const Point x = sample_tangent_gaussian(mu, sigma, rng);
      t.push_back(std::atan2(x.coords[1], x.coords[0]));
    }
    const auto cdf = tabulated_cdf([&](double a) { return wrapped_gaussian_pdf_s1(a, 0.0, sigma * sigma); }, -pi, pi, 200000);
    CHECK(ks_statistic(t, cdf) < 0.02);
  }

  TEST_CASE("half-line samples are log-normal") {
    const double sigma = 0.4, m = 2.0;
    const Point mu(Manifold::spd(1), std::vector{m});
    std::vector<double> x;
    for (std::uint64_t k = 0; k < 10000; ++k) {
      CounterRng rng(4, k);
      x.push_back(sample_tangent_gaussian(mu, sigma, rng).coords[0]);
    }
    CHECK(ks_statistic(x, [&](double v) { return normal_cdf(std::log(v / m) / sigma); }) < 0.02);
  }

  TEST_CASE("hyperbolic radial samples are Rayleigh") {
    const double sigma = 0.7;
    const Point mu(Manifold::hyperbolic2(), std::vector{0.0, 0.0, 1.0});
    std::vector<double> r;
    for (std::uint64_t k = 0; k < 10000; ++k) {
      CounterRng rng(5, k);
      r.push_back(std::acosh(sample_tangent_gaussian(mu, sigma, rng).coords[2]));
    }
    CHECK(ks_statistic(r, [&](double v) { return 1.0 - std::exp(-v * v / (2 * sigma * sigma)); }) < 0.02);
  }

  TEST_CASE("Said sampler") {
    SUBCASE("rejection constant") {
      CHECK(said_rejection_constant(2) == doctest::Approx(std::exp(0.25) / 2).epsilon(1e-15));
      CHECK(said_rejection_constant(3) == doctest::Approx(std::exp(0.75) / 8).epsilon(1e-15));
    }
    SUBCASE("density ratio matches the two densities") {
      std::mt19937_64 g(6);
      std::normal_distribution<double> n;
      const int r = 3;
      const double var = 0.16, s2 = said_proposal_variance(r, var);
      CHECK(s2 == doctest::Approx(2 * var / (2 - 2 * (r - 1) * var)).epsilon(1e-15));
      for (int k = 0; k < 1000; ++k) {
        std::vector<double> rho{std::sqrt(s2) * n(g), std::sqrt(s2) * n(g), std::sqrt(s2) * n(g)};
        double f = 0.0, sq = 0.0;
        for (double x : rho) sq += x * x;
        f = std::exp(-sq / (2 * var));
        for (int i = 0; i < r; ++i)
          for (int j = i + 1; j < r; ++j) f *= std::sinh(std::abs(rho[i] - rho[j]) / 2);
        const double gp = std::exp(-sq / (2 * s2));
        CHECK(said_density_ratio(rho) == doctest::Approx(f / gp).epsilon(1e-10));
        CHECK(f / gp <= said_rejection_constant(r));
      }
    }
    SUBCASE("domain limit") {
      CHECK_THROWS_AS(said_proposal_variance(2, 1.0), DomainError);
      CHECK_THROWS_AS(said_proposal_variance(3, 0.5), DomainError);
      CHECK_NOTHROW(said_proposal_variance(3, 0.49));
      NoiseSpec spec;
      spec.model = NoiseModel::SaidSpd;
      spec.sigma = 1.5;
      CHECK_THROWS_AS(spec.check(Manifold::spd(2)), DomainError);
      spec.sigma = 0.3;
      CHECK_THROWS_AS(spec.check(Manifold::sphere2()), DomainError);
    }
    SUBCASE("Haar factor is orthogonal") {
      CounterRng rng(8, 0);
      for (int k = 0; k < 20; ++k) {
        const Eigen::MatrixXd q = haar_orthogonal(3, rng);
        CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
      }
    }
    SUBCASE("small variance concentrates at the mean") {
      const Point mu(Manifold::spd(2), std::vector{2.0, 0.3, 0.3, 1.0});
      CounterRng rng(9, 0);
      for (int k = 0; k < 20; ++k) CHECK(dist(mu, sample_said_spd(mu, 1e-10, rng)) < 1e-3);
    }
  }

  TEST_CASE("add_noise") {
    const ManifoldImage clean = generate("s1-shapes", 64, 64, 1);
    NoiseSpec none;
    CHECK(add_noise(clean, none, 3).data() == clean.data());

    NoiseSpec s1;
    s1.sigma = 0.3;
    const ManifoldImage noisy = add_noise(clean, s1, 3);
    CHECK(mse(noisy, clean) == doctest::Approx(0.09).epsilon(0.1));
    CHECK(add_noise(clean, s1, 3).data() == noisy.data());
    CHECK(add_noise(clean, s1, 4).data() != noisy.data());

    const ManifoldImage spd = generate("spd3-blocks", 64, 64, 1);
    NoiseSpec s3;
    s3.sigma = 0.125;
    CHECK(mse(add_noise(spd, s3, 3), spd) == doctest::Approx(6 * 0.125 * 0.125).epsilon(0.1));

    NoiseSpec said;
    said.model = NoiseModel::SaidSpd;
    said.sigma = 1.5;
    CHECK_THROWS_AS(add_noise(generate("spd2-blocks", 16, 16, 1), said, 1), DomainError);
  }
}
