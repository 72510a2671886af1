#include "mvd/nlmeans.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mvd/errors.hpp"
#include "mvd/geometry.hpp"
#include "mvd/stats.hpp"
#include "parallel.hpp"

namespace mvd {
namespace {

std::vector<double> spatial_weights(int s, double delta) {
  const int h = (s - 1) / 2;
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(s * s));
  for (int dc = -h; dc <= h; ++dc)
    for (int dr = -h; dr <= h; ++dr) g.push_back(std::exp(-(dr * dr + dc * dc) / (2.0 * delta * delta)));
  return g;
}

double weighted_distance(const ManifoldImage& img, const std::vector<TangentFrame>& ref, const std::vector<double>& g,
                         double g_total, GridIndex i, GridIndex j, int s) {
  const int h = (s - 1) / 2;
  double acc = 0.0, used = 0.0;
  std::size_t q = 0;
  for (int dc = -h; dc <= h; ++dc) {
    for (int dr = -h; dr <= h; ++dr, ++q) {
      if (!img.contains(i.row + dr, i.col + dc) || !img.contains(j.row + dr, j.col + dc)) continue;
      acc += g[q] * ref[q].sq_dist_to(img.pixel(j.row + dr, j.col + dc));
      used += g[q];
    }
  }
  return acc * g_total / used;
}

// Frames at the pixels of the (clipped) patch around i; placeholders where
// the patch leaves the image.
std::vector<TangentFrame> patch_frames(const ManifoldImage& img, GridIndex i, int s) {
  const int h = (s - 1) / 2;
  std::vector<TangentFrame> out;
  out.reserve(static_cast<std::size_t>(s * s));
  for (int dc = -h; dc <= h; ++dc) {
    for (int dr = -h; dr <= h; ++dr) {
      const int r = img.contains(i.row + dr, i.col + dc) ? i.row + dr : i.row;
      const int c = img.contains(i.row + dr, i.col + dc) ? i.col + dc : i.col;
      out.emplace_back(img.manifold(), img.pixel(r, c));
    }
  }
  return out;
}

}  // namespace

void NlMeansParams::check() const {
  if (s < 1 || s % 2 == 0 || w < 1 || w % 2 == 0) throw DomainError("patch and window sides must be odd and positive");
  if (w <= s) throw DomainError("window side must exceed the patch side");
  if (k < 1) throw DomainError("group size must be at least 1");
  if (!(delta > 0.0) || !(tau > 0.0)) throw DomainError("delta and tau must be positive");
  if (threads < 0) throw DomainError("thread count must be non-negative");
}

double nl_patch_distance(const ManifoldImage& image, GridIndex i, GridIndex j, int s, double delta) {
  if (s < 1 || s % 2 == 0) throw DomainError("patch side must be odd and positive");
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  if (!image.contains(i.row, i.col) || !image.contains(j.row, j.col)) throw DomainError("patch centre outside the image");
  const std::vector<double> g = spatial_weights(s, delta);
  double total = 0.0;
  for (double v : g) total += v;
  return weighted_distance(image, patch_frames(image, i, s), g, total, i, j, s);
}

ManifoldImage nlmeans(const ManifoldImage& image, const NlMeansParams& p) {
  p.check();
  const std::vector<double> g = spatial_weights(p.s, p.delta);
  double g_total = 0.0;
  for (double v : g) g_total += v;
  const int hw = (p.w - 1) / 2;
  const std::size_t amb = image.stride();
  ManifoldImage out = image;

  parallel_for(image.size(), p.threads, [&](std::size_t idx) {
    const GridIndex i{static_cast<int>(idx / static_cast<std::size_t>(image.cols())),
                      static_cast<int>(idx % static_cast<std::size_t>(image.cols()))};
    const auto ref = patch_frames(image, i, p.s);
    struct Cand {
      double d;
      int order;
      GridIndex g;
    };
    std::vector<Cand> cand;
    int order = 0;
    for (int c = std::max(0, i.col - hw); c <= std::min(image.cols() - 1, i.col + hw); ++c) {
      for (int r = std::max(0, i.row - hw); r <= std::min(image.rows() - 1, i.row + hw); ++r, ++order) {
        if (r == i.row && c == i.col) continue;
        cand.push_back({weighted_distance(image, ref, g, g_total, i, {r, c}, p.s), order, {r, c}});
      }
    }
    const auto less = [](const Cand& a, const Cand& b) { return a.d < b.d || (a.d == b.d && a.order < b.order); };
    const std::size_t take = std::min(cand.size(), static_cast<std::size_t>(p.k - 1));
    if (take < cand.size()) std::nth_element(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take), cand.end(), less);
    std::sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take), less);

    std::vector<double> pts;
    std::vector<double> wts;
    pts.reserve((take + 1) * amb);
    wts.reserve(take + 1);
    const auto self = image.pixel(i.row, i.col);
    pts.insert(pts.end(), self.begin(), self.end());
    wts.push_back(0.0);
    double wmax = 0.0;
    for (std::size_t t = 0; t < take; ++t) {
      const auto px = image.pixel(cand[t].g.row, cand[t].g.col);
      pts.insert(pts.end(), px.begin(), px.end());
      const double w = std::exp(-cand[t].d / (2.0 * p.tau * p.tau));
      wts.push_back(w);
      wmax = std::max(wmax, w);
    }
    wts[0] = take == 0 ? 1.0 : wmax;
    if (!(wts[0] > 0.0)) wts[0] = 1.0;  // every weight underflowed: keep the pixel
    try {
      const KarcherResult r = karcher_mean(image.manifold(), PointSet{pts.data(), take + 1, amb}, wts);
      std::copy(r.mean.begin(), r.mean.end(), out.pixel(idx).begin());
    } catch (const Error& e) {
      throw GroupError("nlmeans at pixel (" + std::to_string(i.row) + ", " + std::to_string(i.col) + "): " + e.what(),
                       i.row, i.col);
    }
  });
  return out;
}

}  // namespace mvd
