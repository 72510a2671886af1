#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "mvd/image.hpp"
#include "mvd/manifold.hpp"
#include "mvd/rng.hpp"
#include "mvd/stats.hpp"

namespace mvd {

enum class NoiseModel { TangentGaussian, SaidSpd };

struct NoiseSpec {
  NoiseModel model = NoiseModel::TangentGaussian;
  double sigma = 0.0;
  /// Tangent-space covariance (dim x dim); defaults to sigma^2 I.
  /// Only meaningful for the tangent model.
  std::optional<CovMatrix> covariance;

  /// Throws DomainError/ShapeError if this noise model cannot be used on `m`.
  void check(const Manifold& m) const;
};

/// Lower-triangular A with A A^T = cov for a positive semi-definite cov.
/// Zero pivots produce zero columns. Throws ShapeError if cov is not
/// symmetric PSD.
Eigen::MatrixXd lower_factor(const CovMatrix& cov);

/// exp_mu(h(A z)), z ~ N(0, I), A = lower_factor(cov). A zero covariance
/// returns mu unchanged. On Simplex1 a draw whose image hits the simplex
/// boundary is redrawn (up to 100 times).
Point sample_tangent_gaussian(const Point& mu, const CovMatrix& cov, CounterRng& rng);
Point sample_tangent_gaussian(const Point& mu, double sigma, CounterRng& rng);
ProductPoint sample_tangent_gaussian(const ProductPoint& mu, const CovMatrix& cov, CounterRng& rng);

// Closed-form densities of the tangent Gaussian on one-dimensional
// manifolds and on H^2. Each states the reference measure it is taken
// against.

/// Wrapped Gaussian on S^1 in the angle parameter, w.r.t. dt on one period.
/// Sum over |j| <= terms; the truncation error is below
/// exp(-(2 pi terms)^2 / (8 var)).
double wrapped_gaussian_pdf_s1(double t, double t_mu, double var, int terms = 10);

/// Log-normal law on R_{>0} = SPD(1) w.r.t. the manifold measure dx/x.
double lognormal_pdf(double x, double mu, double var);
/// Same law w.r.t. Lebesgue measure dx (lognormal_pdf / x).
double lognormal_pdf_lebesgue(double x, double mu, double var);

/// Density on the simplex Delta_1 parameterised by x(t) = ((1+cos t)/2,
/// (1-cos t)/2), t in (0, pi), w.r.t. dt: the sum of the wrapped Gaussians
/// centred at t_mu and -t_mu.
double simplex_pdf_delta1(double t, double t_mu, double var, int terms = 10);

/// Tangent Gaussian on H^2 around (0,0,1) at geodesic radius r, w.r.t. the
/// Riemannian area sinh(r) dalpha dr.
double h2_radial_pdf(double r, double sigma);

// Sampler for the isotropic Gaussian of Said et al. on SPD(r): Haar
// orthogonal eigenvectors and log-eigenvalues by rejection from
// N(0, s2 I_r) with s2 = 2 var / (2 - 2 (r-1) var).

/// Rejection bound C = e^{r(r-1)/8} 2^{-r(r-1)/2}.
double said_rejection_constant(int r);
/// Proposal variance s2; throws DomainError unless var < 1/(r-1).
double said_proposal_variance(int r, double var);
/// f(rho)/g(rho) = prod_{i<j} sinh(|rho_i - rho_j|/2) exp(-(r-1)/2 |rho|^2).
double said_density_ratio(std::span<const double> rho);
/// Haar-distributed element of O(r): QR of a Gaussian matrix with the signs
/// of R's diagonal folded into Q.
Eigen::MatrixXd haar_orthogonal(int r, CounterRng& rng);
/// One draw; throws DomainError unless mu is SPD(r) with var < 1/(r-1).
Point sample_said_spd(const Point& mu, double var, CounterRng& rng);

/// Independent noise on every pixel, centred at the clean value. Pixel i
/// draws from CounterRng(seed, i), so the result does not depend on the
/// processing order.
ManifoldImage add_noise(const ManifoldImage& image, const NoiseSpec& spec, std::uint64_t seed);

}  // namespace mvd
