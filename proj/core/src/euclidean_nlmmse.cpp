#include "mvd/euclidean_nlmmse.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <tuple>

#include "mvd/errors.hpp"

namespace mvd {
namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Grid {
  const ManifoldImage& img;
  int d;

  const double* px(int r, int c) const { return img.pixel(r, c).data(); }

  // Column-major patch as a length s*s*d vector.
  Vec patch(int r, int c, int s) const {
    const int h = (s - 1) / 2;
    Vec v(s * s * d);
    int k = 0;
    for (int dc = 0; dc < s; ++dc)
      for (int dr = 0; dr < s; ++dr)
        for (int e = 0; e < d; ++e) v(k++) = px(r - h + dr, c - h + dc)[e];
    return v;
  }
};

std::vector<std::pair<int, int>> similar(const Grid& g, int r, int c, int s, int w, int k) {
  const int h = (s - 1) / 2;
  const int hw = (w - 1) / 2;
  const int rows = g.img.rows(), cols = g.img.cols();
  std::vector<std::tuple<double, int, int, int>> cand;  // distance, order, row, col
  int order = 0;
  for (int cc = std::max(h, c - hw); cc <= std::min(cols - 1 - h, c + hw); ++cc) {
    for (int rr = std::max(h, r - hw); rr <= std::min(rows - 1 - h, r + hw); ++rr, ++order) {
      if (rr == r && cc == c) continue;
      double acc = 0.0;
      for (int dc = 0; dc < s; ++dc) {
        for (int dr = 0; dr < s; ++dr) {
          const double* a = g.px(r - h + dr, c - h + dc);
          const double* b = g.px(rr - h + dr, cc - h + dc);
          double sq = 0.0;
          for (int e = 0; e < g.d; ++e) sq += (a[e] - b[e]) * (a[e] - b[e]);
          acc += sq;
        }
      }
      cand.emplace_back(acc, order, rr, cc);
    }
  }
  std::sort(cand.begin(), cand.end());
  std::vector<std::pair<int, int>> out{{r, c}};
  for (std::size_t t = 0; t < cand.size() && out.size() < static_cast<std::size_t>(k); ++t) {
    out.emplace_back(std::get<2>(cand[t]), std::get<3>(cand[t]));
  }
  return out;
}

// (Sigma - sigma^2 I) Sigma^{-1} with the eigenvalue floor used throughout
// the library.
Mat mmse_filter(const Mat& sigma_y, double sigma2) {
  Eigen::SelfAdjointEigenSolver<Mat> es(sigma_y);
  double floor = 1e-10 * std::max(sigma2, sigma_y.trace() / static_cast<double>(sigma_y.rows()));
  if (!(floor > 0.0)) floor = std::numeric_limits<double>::min();
  Vec f(sigma_y.rows());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double l = es.eigenvalues()(i);
    f(i) = std::max(l - sigma2, floor) / std::max(l, floor);
  }
  return es.eigenvectors() * f.asDiagonal() * es.eigenvectors().transpose();
}

struct Accum {
  std::vector<double> sum;
  std::vector<int> n;
};

void add_patch(Accum& acc, const Vec& v, int r, int c, int s, int d, int cols) {
  const int h = (s - 1) / 2;
  int k = 0;
  for (int dc = 0; dc < s; ++dc) {
    for (int dr = 0; dr < s; ++dr) {
      const std::size_t p = static_cast<std::size_t>(r - h + dr) * static_cast<std::size_t>(cols) +
                            static_cast<std::size_t>(c - h + dc);
      for (int e = 0; e < d; ++e) acc.sum[p * static_cast<std::size_t>(d) + static_cast<std::size_t>(e)] += v(k++);
      ++acc.n[p];
    }
  }
}

ManifoldImage pass(const ManifoldImage& noisy, const ManifoldImage& match, const ManifoldImage* oracle, int s, int w,
                   int k, double gamma, double sigma2, bool accelerate) {
  const int d = noisy.manifold().dim();
  const int rows = noisy.rows(), cols = noisy.cols();
  const int h = (s - 1) / 2;
  const Grid gy{noisy, d}, gm{match, d};
  Accum acc{std::vector<double>(noisy.data().size(), 0.0), std::vector<int>(noisy.size(), 0)};
  std::vector<char> used(noisy.size(), 0);

  for (int c = h; c + h < cols; ++c) {
    for (int r = h; r + h < rows; ++r) {
      if (accelerate && used[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)]) continue;
      const auto members = similar(gm, r, c, s, w, k);
      if (accelerate) {
        for (auto [mr, mc] : members) used[static_cast<std::size_t>(mr) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(mc)] = 1;
      }
      const auto kk = static_cast<Eigen::Index>(members.size());
      const Eigen::Index n = s * s * d;
      Mat y(n, kk);
      for (Eigen::Index j = 0; j < kk; ++j) y.col(j) = gy.patch(members[static_cast<std::size_t>(j)].first, members[static_cast<std::size_t>(j)].second, s);

      // Homogeneous area test on the pooled pixel values.
      Vec m = Vec::Zero(d);
      for (Eigen::Index j = 0; j < kk; ++j)
        for (Eigen::Index q = 0; q < s * s; ++q) m += y.col(j).segment(q * d, d);
      m /= static_cast<double>(kk * s * s);
      double var = 0.0;
      for (Eigen::Index j = 0; j < kk; ++j)
        for (Eigen::Index q = 0; q < s * s; ++q) var += (y.col(j).segment(q * d, d) - m).squaredNorm();
      var /= static_cast<double>(d) * static_cast<double>(kk * s * s);

      Mat est(n, kk);
      if (var <= gamma * sigma2) {
        for (Eigen::Index j = 0; j < kk; ++j)
          for (Eigen::Index q = 0; q < s * s; ++q) est.col(j).segment(q * d, d) = m;
      } else {
        const Vec mu = y.rowwise().mean();
        const Mat yc = y.colwise() - mu;
        if (oracle == nullptr) {
          Mat cov = yc * yc.transpose() / static_cast<double>(kk);
          cov = 0.5 * (cov + cov.transpose()).eval();
          est = (mmse_filter(cov, sigma2) * yc).colwise() + mu;
        } else if (sigma2 > 0.0) {
          const Grid go{*oracle, d};
          Mat oc(n, kk);
          for (Eigen::Index j = 0; j < kk; ++j) oc.col(j) = go.patch(members[static_cast<std::size_t>(j)].first, members[static_cast<std::size_t>(j)].second, s) - mu;
          Mat cov = oc * oc.transpose() / static_cast<double>(kk);
          cov.diagonal().array() += sigma2;
          // Wiener filter C (C + s^2 I)^-1 written as I - s^2 (C + s^2 I)^-1.
          const Mat inv = cov.ldlt().solve(Mat::Identity(n, n));
          est = (yc - sigma2 * (inv * yc)).colwise() + mu;
        } else {
          est = y;
        }
      }
      for (Eigen::Index j = 0; j < kk; ++j) {
        add_patch(acc, est.col(j), members[static_cast<std::size_t>(j)].first, members[static_cast<std::size_t>(j)].second, s, d, cols);
      }
    }
  }

  ManifoldImage out = noisy;
  for (std::size_t p = 0; p < noisy.size(); ++p) {
    if (acc.n[p] == 0) continue;
    for (int e = 0; e < d; ++e) {
      out.data()[p * static_cast<std::size_t>(d) + static_cast<std::size_t>(e)] =
          acc.sum[p * static_cast<std::size_t>(d) + static_cast<std::size_t>(e)] / acc.n[p];
    }
  }
  return out;
}

}  // namespace

NlmmseResult euclidean_nlmmse(const ManifoldImage& noisy, const DenoiseParams& params) {
  if (noisy.manifold().kind() != ManifoldKind::Euclidean) throw ShapeError("euclidean_nlmmse needs a Euclidean image");
  params.check();
  const int need = std::max(params.w1, params.w2);
  if (noisy.rows() < need || noisy.cols() < need) throw DomainError("image is smaller than the search window");
  const double sigma2 = params.sigma * params.sigma;
  NlmmseResult res;
  res.oracle = pass(noisy, noisy, nullptr, params.s1, params.w1, params.k1, params.gamma, sigma2, params.accelerate);
  res.final = pass(noisy, res.oracle, &res.oracle, params.s2, params.w2, params.k2, params.gamma, sigma2,
                   params.accelerate);
  return res;
}

}  // namespace mvd
