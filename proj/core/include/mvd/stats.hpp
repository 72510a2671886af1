#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "mvd/manifold.hpp"

namespace mvd {

using CovMatrix = Eigen::MatrixXd;

struct KarcherConfig {
  int max_iters = 50;
  double grad_tol = 1e-10;
  double step = 1.0;
};

struct KarcherResult {
  std::vector<double> mean;  // ambient coordinates
  double grad_norm = 0.0;    // |sum_k w_k log_m(x_k)| / sum_k w_k at the returned point
  int iterations = 0;        // gradient evaluations
  double sum_sq_dist = 0.0;  // sum_k w_k dist(m, x_k)^2 at the returned point
};

/// Points of a single manifold laid out back to back (`count` points of
/// `stride` reals each; stride defaults to ambient_len).
struct PointSet {
  const double* data = nullptr;
  std::size_t count = 0;
  std::size_t stride = 0;

  std::span<const double> operator[](std::size_t k) const { return {data + k * stride, stride}; }
};

/// Weighted Karcher mean by Riemannian gradient descent, started at the
/// first point:  m <- exp_m(step * sum_k w_k log_m(x_k) / sum_k w_k).
/// Stops once the weighted mean gradient is at most cfg.grad_tol.
///
/// Throws ConvergenceError (with the final gradient norm) after
/// cfg.max_iters gradient evaluations, and CutLocusError with the index of
/// the offending point if some log is undefined along the way.
KarcherResult karcher_mean(const Manifold& m, PointSet points, std::span<const double> weights,
                           const KarcherConfig& cfg = {});

Point karcher_mean(const std::vector<Point>& points, std::span<const double> weights = {},
                   const KarcherConfig& cfg = {});

/// Product-manifold mean, computed componentwise (the squared product
/// distance separates). Each component is driven to grad_tol/sqrt(count) so
/// the stacked gradient meets grad_tol.
ProductPoint karcher_mean(const std::vector<ProductPoint>& points, std::span<const double> weights = {},
                          const KarcherConfig& cfg = {});

/// (1/K) sum_k v_k v_k^T with v_k the tangent coordinates of log_mean(x_k).
CovMatrix empirical_covariance(const std::vector<ProductPoint>& points, const ProductPoint& mean);
CovMatrix empirical_covariance(const std::vector<Point>& points, const Point& mean);

/// sum_j sum_k dist(m, y_jk)^2 / (d K s^2) over every pixel of every patch.
double pooled_variance(const std::vector<ProductPoint>& patches, const Point& scalar_mean);

/// The empirical MMSE map v -> (Sigma - sigma^2 I) Sigma^{-1} v, evaluated
/// through Sigma = Q Lambda Q^T as Q D Q^T v with
///   D_ii = max(lambda_i - sigma^2, floor) / max(lambda_i, floor),
///   floor = 1e-10 * max(sigma^2, trace(Sigma)/n).
/// Shrunk eigenvalues that would go negative are clipped to the floor.
class ShrinkageOperator {
 public:
  /// Throws ShapeError for a non-square or non-symmetric Sigma.
  ShrinkageOperator(const CovMatrix& sigma_y, double noise_var);

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return matrix_ * v; }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  const Eigen::VectorXd& factors() const noexcept { return factors_; }

 private:
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd factors_;
};

std::vector<double> shrinkage_apply(const CovMatrix& sigma_y, double noise_var, std::span<const double> v);

}  // namespace mvd
