#include "mvd/stats.hpp"

#include <cmath>
#include <limits>

#include "mvd/errors.hpp"
#include "mvd/geometry.hpp"

namespace mvd {
namespace {

KarcherResult karcher_impl(const Manifold& m, PointSet pts, std::span<const double> weights,
                           const KarcherConfig& cfg, double tol) {
  if (pts.count == 0) throw ShapeError("karcher_mean of an empty set");
  if (!weights.empty() && weights.size() != pts.count) throw ShapeError("karcher_mean: one weight per point");
  if (cfg.max_iters < 1 || !(cfg.grad_tol > 0.0)) throw DomainError("karcher_mean: invalid configuration");

  double wsum = 0.0;
  if (weights.empty()) {
    wsum = static_cast<double>(pts.count);
  } else {
    for (double w : weights) {
      if (w < 0.0) throw DomainError("karcher_mean: negative weight");
      wsum += w;
    }
    if (!(wsum > 0.0)) throw DomainError("karcher_mean: weights sum to zero");
  }

  const auto d = static_cast<std::size_t>(m.dim());
  const auto a = static_cast<std::size_t>(m.ambient_len());
  KarcherResult res;
  res.mean.assign(pts[0].begin(), pts[0].begin() + static_cast<std::ptrdiff_t>(a));
  if (m.kind() == ManifoldKind::Euclidean) {
    // Closed form; the loop below then only confirms the vanishing gradient.
    std::fill(res.mean.begin(), res.mean.end(), 0.0);
    for (std::size_t k = 0; k < pts.count; ++k) {
      const double w = (weights.empty() ? 1.0 : weights[k]) / wsum;
      for (std::size_t i = 0; i < a; ++i) res.mean[i] += w * pts[k][i];
    }
  }
  std::vector<double> grad(d), v(d), next(a);

  for (int it = 1; it <= cfg.max_iters; ++it) {
    TangentFrame frame(m, res.mean);
    std::fill(grad.begin(), grad.end(), 0.0);
    double ssd = 0.0;
    for (std::size_t k = 0; k < pts.count; ++k) {
      const double w = weights.empty() ? 1.0 : weights[k];
      if (w == 0.0) continue;
      if (m.kind() == ManifoldKind::Euclidean) {
        for (std::size_t i = 0; i < a; ++i) v[i] = pts[k][i] - res.mean[i];
      } else {
        try {
          frame.log(pts[k].first(a), v);
        } catch (const CutLocusError& e) {
          throw CutLocusError(e.what(), k);
        }
      }
      double n2 = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        grad[i] += w * v[i];
        n2 += v[i] * v[i];
      }
      ssd += w * n2;
    }
    double gn = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      grad[i] /= wsum;
      gn += grad[i] * grad[i];
    }
    gn = std::sqrt(gn);
    res.grad_norm = gn;
    res.iterations = it;
    res.sum_sq_dist = ssd;
    if (gn <= tol) return res;
    if (it == cfg.max_iters) break;
    for (std::size_t i = 0; i < d; ++i) grad[i] *= cfg.step;
    frame.exp(grad, next);
    res.mean = next;
  }
  throw ConvergenceError("karcher_mean did not converge in " + std::to_string(cfg.max_iters) +
                             " iterations (gradient norm " + std::to_string(res.grad_norm) + ")",
                         res.grad_norm);
}

void check_product_set(const std::vector<ProductPoint>& points) {
  if (points.empty()) throw ShapeError("empty set of product points");
  for (const auto& p : points) {
    if (!(p.manifold == points[0].manifold) || p.count != points[0].count) {
      throw ShapeError("product points differ in manifold or component count");
    }
  }
}

}  // namespace

KarcherResult karcher_mean(const Manifold& m, PointSet points, std::span<const double> weights,
                           const KarcherConfig& cfg) {
  if (points.stride == 0) points.stride = static_cast<std::size_t>(m.ambient_len());
  return karcher_impl(m, points, weights, cfg, cfg.grad_tol);
}

Point karcher_mean(const std::vector<Point>& points, std::span<const double> weights, const KarcherConfig& cfg) {
  if (points.empty()) throw ShapeError("karcher_mean of an empty set");
  const Manifold m = points[0].manifold;
  const auto a = static_cast<std::size_t>(m.ambient_len());
  std::vector<double> flat;
  flat.reserve(points.size() * a);
  for (const auto& p : points) {
    if (!(p.manifold == m) || p.coords.size() != a) throw ShapeError("karcher_mean: mixed manifolds");
    flat.insert(flat.end(), p.coords.begin(), p.coords.end());
  }
  auto r = karcher_impl(m, {flat.data(), points.size(), a}, weights, cfg, cfg.grad_tol);
  return Point(m, std::move(r.mean));
}

ProductPoint karcher_mean(const std::vector<ProductPoint>& points, std::span<const double> weights,
                          const KarcherConfig& cfg) {
  check_product_set(points);
  const Manifold m = points[0].manifold;
  const std::size_t count = points[0].count;
  const auto a = static_cast<std::size_t>(m.ambient_len());
  const double tol = cfg.grad_tol / std::sqrt(static_cast<double>(count));
  ProductPoint out(m, count);
  std::vector<double> comp(points.size() * a);
  for (std::size_t j = 0; j < count; ++j) {
    for (std::size_t k = 0; k < points.size(); ++k) {
      const auto c = points[k].component(j);
      std::copy(c.begin(), c.end(), comp.begin() + static_cast<std::ptrdiff_t>(k * a));
    }
    auto r = karcher_impl(m, {comp.data(), points.size(), a}, weights, cfg, tol);
    std::copy(r.mean.begin(), r.mean.end(), out.component(j).begin());
  }
  return out;
}

CovMatrix empirical_covariance(const std::vector<ProductPoint>& points, const ProductPoint& mean) {
  check_product_set(points);
  const std::size_t n = mean.tangent_dim();
  CovMatrix cov = CovMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& p : points) {
    const std::vector<double> v = product_log(mean, p);
    const Eigen::Map<const Eigen::VectorXd> vv(v.data(), static_cast<Eigen::Index>(n));
    cov.selfadjointView<Eigen::Lower>().rankUpdate(vv);
  }
  cov = cov.selfadjointView<Eigen::Lower>();
  return cov / static_cast<double>(points.size());
}

CovMatrix empirical_covariance(const std::vector<Point>& points, const Point& mean) {
  std::vector<ProductPoint> pp;
  pp.reserve(points.size());
  for (const auto& p : points) pp.emplace_back(p.manifold, 1, p.coords);
  return empirical_covariance(pp, ProductPoint(mean.manifold, 1, mean.coords));
}

double pooled_variance(const std::vector<ProductPoint>& patches, const Point& scalar_mean) {
  check_product_set(patches);
  if (!(patches[0].manifold == scalar_mean.manifold)) throw ShapeError("pooled_variance: manifold mismatch");
  double acc = 0.0;
  for (const auto& p : patches) {
    for (std::size_t j = 0; j < p.count; ++j) acc += sq_dist(p.manifold, scalar_mean.coords, p.component(j));
  }
  const double denom = static_cast<double>(scalar_mean.manifold.dim()) * static_cast<double>(patches.size()) *
                       static_cast<double>(patches[0].count);
  return acc / denom;
}

ShrinkageOperator::ShrinkageOperator(const CovMatrix& sigma_y, double noise_var) {
  const Eigen::Index n = sigma_y.rows();
  if (n == 0 || sigma_y.cols() != n) throw ShapeError("shrinkage: covariance must be square");
  if (noise_var < 0.0) throw DomainError("shrinkage: negative noise variance");
  const double scale = std::max(1.0, sigma_y.cwiseAbs().maxCoeff());
  if ((sigma_y - sigma_y.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ShapeError("shrinkage: covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_y);
  if (es.info() != Eigen::Success) throw ShapeError("shrinkage: eigendecomposition failed");
  double floor = 1e-10 * std::max(noise_var, sigma_y.trace() / static_cast<double>(n));
  if (!(floor > 0.0)) floor = std::numeric_limits<double>::min();
  const Eigen::VectorXd& lam = es.eigenvalues();
  factors_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    factors_(i) = std::max(lam(i) - noise_var, floor) / std::max(lam(i), floor);
  }
  const Eigen::MatrixXd& q = es.eigenvectors();
  matrix_ = q * factors_.asDiagonal() * q.transpose();
}

std::vector<double> shrinkage_apply(const CovMatrix& sigma_y, double noise_var, std::span<const double> v) {
  if (v.size() != static_cast<std::size_t>(sigma_y.rows())) throw ShapeError("shrinkage: vector length mismatch");
  ShrinkageOperator op(sigma_y, noise_var);
  const Eigen::Map<const Eigen::VectorXd> vv(v.data(), static_cast<Eigen::Index>(v.size()));
  const Eigen::VectorXd out = op.matrix() * vv;
  return {out.data(), out.data() + out.size()};
}

}  // namespace mvd
