#include "mvd/noise.hpp"

#include <cmath>
#include <numbers>

#include "mvd/errors.hpp"
#include "mvd/geometry.hpp"

namespace mvd {
namespace {

using std::numbers::pi;

constexpr int kSimplexRetries = 100;
constexpr int kSaidMaxProposals = 1'000'000;

std::vector<double> draw_tangent(const Eigen::MatrixXd& factor, CounterRng& rng) {
  const Eigen::Index n = factor.rows();
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.normal();
  const Eigen::VectorXd x = factor.triangularView<Eigen::Lower>() * z;
  return {x.data(), x.data() + n};
}

}  // namespace

void NoiseSpec::check(const Manifold& m) const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("noise sigma must be finite and non-negative");
  if (model == NoiseModel::SaidSpd) {
    if (m.kind() != ManifoldKind::Spd) throw DomainError("the Said model is only defined on SPD(r)");
    said_proposal_variance(m.param(), sigma * sigma);
    if (covariance) throw DomainError("the Said model is isotropic; no covariance allowed");
  } else if (covariance) {
    if (covariance->rows() != m.dim() || covariance->cols() != m.dim()) {
      throw ShapeError("noise covariance must be dim x dim");
    }
  }
}

Eigen::MatrixXd lower_factor(const CovMatrix& cov) {
  const Eigen::Index n = cov.rows();
  if (cov.cols() != n) throw ShapeError("covariance must be square");
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if (n > 0 && (cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ShapeError("covariance is not symmetric");
  }
  const double tol = 1e-12 * scale;
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = cov(j, j);
    for (Eigen::Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d < -tol) throw ShapeError("covariance is not positive semi-definite");
    if (d <= tol) {
      for (Eigen::Index i = j + 1; i < n; ++i) {
        double r = cov(i, j);
        for (Eigen::Index k = 0; k < j; ++k) r -= l(i, k) * l(j, k);
        if (std::abs(r) > std::sqrt(tol) * scale) throw ShapeError("covariance is not positive semi-definite");
      }
      continue;
    }
    l(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double r = cov(i, j);
      for (Eigen::Index k = 0; k < j; ++k) r -= l(i, k) * l(j, k);
      l(i, j) = r / l(j, j);
    }
  }
  return l;
}

Point sample_tangent_gaussian(const Point& mu, const CovMatrix& cov, CounterRng& rng) {
  const int d = mu.manifold.dim();
  if (cov.rows() != d || cov.cols() != d) throw ShapeError("covariance must be dim x dim");
  const Eigen::MatrixXd factor = lower_factor(cov);
  TangentFrame frame(mu.manifold, mu.coords);
  Point out(mu.manifold, std::vector<double>(mu.coords.size()));
  for (int attempt = 0; attempt < kSimplexRetries; ++attempt) {
    const std::vector<double> v = draw_tangent(factor, rng);
    try {
      frame.exp(v, out.coords);
      return out;
    } catch (const DomainError&) {
      if (mu.manifold.kind() != ManifoldKind::Simplex1) throw;
    }
  }
  throw DomainError("tangent Gaussian sample kept leaving the open simplex");
}

Point sample_tangent_gaussian(const Point& mu, double sigma, CounterRng& rng) {
  const int d = mu.manifold.dim();
  return sample_tangent_gaussian(mu, CovMatrix::Identity(d, d) * (sigma * sigma), rng);
}

ProductPoint sample_tangent_gaussian(const ProductPoint& mu, const CovMatrix& cov, CounterRng& rng) {
  const auto n = static_cast<Eigen::Index>(mu.tangent_dim());
  if (cov.rows() != n || cov.cols() != n) throw ShapeError("covariance must be (count*dim) square");
  const Eigen::MatrixXd factor = lower_factor(cov);
  for (int attempt = 0; attempt < kSimplexRetries; ++attempt) {
    const std::vector<double> v = draw_tangent(factor, rng);
    try {
      return product_exp(mu, v);
    } catch (const DomainError&) {
      if (mu.manifold.kind() != ManifoldKind::Simplex1) throw;
    }
  }
  throw DomainError("tangent Gaussian sample kept leaving the open simplex");
}

double wrapped_gaussian_pdf_s1(double t, double t_mu, double var, int terms) {
  if (!(var > 0.0)) throw DomainError("wrapped Gaussian needs a positive variance");
  if (terms < 1) throw DomainError("wrapped Gaussian needs at least one wrap term");
  const double a = t - t_mu;
  double acc = 0.0;
  // Pair +j and -j so the sum is exactly even in a.
  acc += std::exp(-a * a / (2.0 * var));
  for (int j = 1; j <= terms; ++j) {
    const double p = a + 2.0 * pi * j;
    const double m = a - 2.0 * pi * j;
    acc += std::exp(-p * p / (2.0 * var)) + std::exp(-m * m / (2.0 * var));
  }
  return acc / std::sqrt(2.0 * pi * var);
}

double lognormal_pdf(double x, double mu, double var) {
  if (!(x > 0.0) || !(mu > 0.0)) throw DomainError("log-normal density needs positive arguments");
  if (!(var > 0.0)) throw DomainError("log-normal density needs a positive variance");
  const double l = std::log(x) - std::log(mu);
  return std::exp(-l * l / (2.0 * var)) / std::sqrt(2.0 * pi * var);
}

double lognormal_pdf_lebesgue(double x, double mu, double var) { return lognormal_pdf(x, mu, var) / x; }

double simplex_pdf_delta1(double t, double t_mu, double var, int terms) {
  if (!(t > 0.0 && t < pi) || !(t_mu > 0.0 && t_mu < pi)) {
    throw DomainError("simplex density is only defined on the open interval (0, pi)");
  }
  return wrapped_gaussian_pdf_s1(t, t_mu, var, terms) + wrapped_gaussian_pdf_s1(t, -t_mu, var, terms);
}

double h2_radial_pdf(double r, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("H^2 density needs a positive sigma");
  if (r < 0.0) throw DomainError("H^2 radius must be non-negative");
  const double ratio = r < 1e-8 ? 1.0 - r * r / 6.0 : r / std::sinh(r);
  return std::exp(-r * r / (2.0 * sigma * sigma)) * ratio / (2.0 * pi * sigma * sigma);
}

double said_rejection_constant(int r) {
  const double p = r * (r - 1);
  return std::exp(p / 8.0) * std::pow(2.0, -p / 2.0);
}

double said_proposal_variance(int r, double var) {
  if (!(var > 0.0)) throw DomainError("Said sampler needs a positive variance");
  if (r > 1 && !(var < 1.0 / (r - 1))) {
    throw DomainError("Said sampler requires sigma^2 < 1/(r-1) (got sigma^2 = " + std::to_string(var) +
                      ", r = " + std::to_string(r) + ")");
  }
  return 2.0 * var / (2.0 - 2.0 * (r - 1) * var);
}

double said_density_ratio(std::span<const double> rho) {
  const auto r = rho.size();
  double prod = 1.0;
  double sq = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    sq += rho[i] * rho[i];
    for (std::size_t j = i + 1; j < r; ++j) prod *= std::sinh(std::abs(rho[i] - rho[j]) / 2.0);
  }
  return prod * std::exp(-0.5 * static_cast<double>(r - 1) * sq);
}

Eigen::MatrixXd haar_orthogonal(int r, CounterRng& rng) {
  Eigen::MatrixXd a(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) a(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(r, r);
  const Eigen::MatrixXd rr = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < r; ++j) {
    if (rr(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

Point sample_said_spd(const Point& mu, double var, CounterRng& rng) {
  if (mu.manifold.kind() != ManifoldKind::Spd) throw DomainError("Said sampler needs an SPD base point");
  const int r = mu.manifold.param();
  const double s2 = said_proposal_variance(r, var);
  const double c = said_rejection_constant(r);
  const double sd = std::sqrt(s2);

  const Eigen::MatrixXd u = haar_orthogonal(r, rng);
  Eigen::VectorXd rho(r);
  bool accepted = false;
  for (int attempt = 0; attempt < kSaidMaxProposals && !accepted; ++attempt) {
    for (int i = 0; i < r; ++i) rho(i) = sd * rng.normal();
    const double ratio = said_density_ratio(std::span<const double>(rho.data(), static_cast<std::size_t>(r)));
    accepted = rng.uniform() * c <= ratio;
  }
  if (!accepted) throw DomainError("Said sampler: rejection loop exhausted");

  const Eigen::MatrixXd x = u * rho.array().exp().matrix().asDiagonal() * u.transpose();
  Eigen::MatrixXd m(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) m(i, j) = mu.coords[static_cast<std::size_t>(i * r + j)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success || !(es.eigenvalues().minCoeff() > 0.0)) {
    throw DomainError("Said sampler: mean is not positive definite");
  }
  const Eigen::MatrixXd sq = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  Eigen::MatrixXd y = sq * x * sq;
  y = 0.5 * (y + y.transpose()).eval();
  Point out(mu.manifold, std::vector<double>(static_cast<std::size_t>(r * r)));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) out.coords[static_cast<std::size_t>(i * r + j)] = y(i, j);
  return out;
}

ManifoldImage add_noise(const ManifoldImage& image, const NoiseSpec& spec, std::uint64_t seed) {
  const Manifold& m = image.manifold();
  spec.check(m);
  ManifoldImage out = image;
  if (spec.sigma == 0.0 && !spec.covariance) return out;

  const int d = m.dim();
  const CovMatrix cov = spec.covariance ? *spec.covariance : CovMatrix::Identity(d, d) * (spec.sigma * spec.sigma);
  for (std::size_t i = 0; i < image.size(); ++i) {
    CounterRng rng(seed, i);
    const Point clean(m, image.pixel(i));
    const Point noisy = spec.model == NoiseModel::SaidSpd ? sample_said_spd(clean, spec.sigma * spec.sigma, rng)
                                                          : sample_tangent_gaussian(clean, cov, rng);
    std::copy(noisy.coords.begin(), noisy.coords.end(), out.pixel(i).begin());
  }
  return out;
}

}  // namespace mvd
