#include "mvd/denoise.hpp"

#include <algorithm>
#include <cmath>

#include "mvd/errors.hpp"
#include "mvd/geometry.hpp"
#include "parallel.hpp"

namespace mvd {
namespace {

// Raised inside group processing when member `member` has to be dropped.
struct MemberCut {
  std::size_t member;
  std::string what;
};

bool odd(int v) { return v > 0 && v % 2 == 1; }

// Patches of a group laid out back to back: member k, component j starts at
// (k * c + j) * a.
struct FlatPatches {
  std::vector<double> data;
  std::size_t count = 0;  // members
  std::size_t comps = 0;  // s^2
  std::size_t amb = 0;

  const double* at(std::size_t k, std::size_t j) const { return data.data() + (k * comps + j) * amb; }
};

FlatPatches gather(const ManifoldImage& img, const std::vector<GridIndex>& members, int s) {
  const int h = (s - 1) / 2;
  FlatPatches out;
  out.count = members.size();
  out.comps = static_cast<std::size_t>(s) * static_cast<std::size_t>(s);
  out.amb = img.stride();
  out.data.resize(out.count * out.comps * out.amb);
  double* dst = out.data.data();
  for (const GridIndex& g : members) {
    for (int dc = 0; dc < s; ++dc) {
      for (int dr = 0; dr < s; ++dr) {
        const auto px = img.pixel(g.row - h + dr, g.col - h + dc);
        dst = std::copy(px.begin(), px.end(), dst);
      }
    }
  }
  return out;
}

FlatPatches flatten(const std::vector<ProductPoint>& patches) {
  if (patches.empty()) throw ShapeError("empty patch group");
  FlatPatches out;
  out.count = patches.size();
  out.comps = patches[0].count;
  out.amb = static_cast<std::size_t>(patches[0].manifold.ambient_len());
  out.data.reserve(out.count * out.comps * out.amb);
  for (const auto& p : patches) {
    if (!(p.manifold == patches[0].manifold) || p.count != out.comps) {
      throw ShapeError("patches of a group differ in manifold or size");
    }
    out.data.insert(out.data.end(), p.coords.begin(), p.coords.end());
  }
  return out;
}

struct FlatTest {
  bool flat = false;
  std::vector<double> mean;
  double variance = 0.0;
};

FlatTest flat_test(const Manifold& m, const FlatPatches& y, double gamma, double sigma2) {
  KarcherResult r;
  try {
    r = karcher_mean(m, PointSet{y.data.data(), y.count * y.comps, y.amb}, {});
  } catch (const CutLocusError& e) {
    throw MemberCut{e.index() / y.comps, e.what()};
  }
  FlatTest t;
  t.variance = r.sum_sq_dist / (static_cast<double>(m.dim()) * static_cast<double>(y.count * y.comps));
  t.flat = t.variance <= gamma * sigma2;
  t.mean = std::move(r.mean);
  return t;
}

std::vector<double> patch_mean(const Manifold& m, const FlatPatches& y) {
  KarcherConfig cfg;
  cfg.grad_tol /= std::sqrt(static_cast<double>(y.comps));
  std::vector<double> mu(y.comps * y.amb);
  for (std::size_t j = 0; j < y.comps; ++j) {
    KarcherResult r;
    try {
      r = karcher_mean(m, PointSet{y.at(0, j), y.count, y.comps * y.amb}, {}, cfg);
    } catch (const CutLocusError& e) {
      throw MemberCut{e.index(), e.what()};
    }
    std::copy(r.mean.begin(), r.mean.end(), mu.begin() + static_cast<std::ptrdiff_t>(j * y.amb));
  }
  return mu;
}

std::vector<TangentFrame> frames_at(const Manifold& m, const std::vector<double>& mu, std::size_t comps) {
  std::vector<TangentFrame> frames;
  frames.reserve(comps);
  const auto a = static_cast<std::size_t>(m.ambient_len());
  for (std::size_t j = 0; j < comps; ++j) frames.emplace_back(m, std::span<const double>(mu.data() + j * a, a));
  return frames;
}

// Tangent coordinates of every member at the mean patch, one column per member.
Eigen::MatrixXd logs_at(const std::vector<TangentFrame>& frames, const FlatPatches& y, int d) {
  const auto n = static_cast<Eigen::Index>(y.comps) * d;
  Eigen::MatrixXd l(n, static_cast<Eigen::Index>(y.count));
  const bool euclid = frames[0].manifold().kind() == ManifoldKind::Euclidean;
  for (std::size_t k = 0; k < y.count; ++k) {
    double* col = l.col(static_cast<Eigen::Index>(k)).data();
    for (std::size_t j = 0; j < y.comps; ++j) {
      if (euclid) {
        const double* x = frames[j].base().data();
        const double* p = y.at(k, j);
        for (std::size_t e = 0; e < y.amb; ++e) col[j * y.amb + e] = p[e] - x[e];
        continue;
      }
      try {
        frames[j].log({y.at(k, j), y.amb}, {col + j * static_cast<std::size_t>(d), static_cast<std::size_t>(d)});
      } catch (const CutLocusError& e) {
        throw MemberCut{k, e.what()};
      }
    }
  }
  return l;
}

CovMatrix second_moment(const Eigen::MatrixXd& l) {
  const Eigen::Index n = l.rows();
  CovMatrix cov = CovMatrix::Zero(n, n);
  cov.selfadjointView<Eigen::Lower>().rankUpdate(l);
  cov = cov.selfadjointView<Eigen::Lower>();
  return cov / static_cast<double>(l.cols());
}

std::vector<double> restore(const std::vector<TangentFrame>& frames, const Eigen::MatrixXd& t, std::size_t amb,
                            int d) {
  const std::size_t comps = frames.size();
  std::vector<double> out(static_cast<std::size_t>(t.cols()) * comps * amb);
  for (Eigen::Index k = 0; k < t.cols(); ++k) {
    const double* col = t.col(k).data();
    for (std::size_t j = 0; j < comps; ++j) {
      frames[j].exp({col + j * static_cast<std::size_t>(d), static_cast<std::size_t>(d)},
                    {out.data() + (static_cast<std::size_t>(k) * comps + j) * amb, amb});
    }
  }
  return out;
}

std::vector<double> fill_flat(const std::vector<double>& mean, std::size_t count) {
  std::vector<double> out;
  out.reserve(count * mean.size());
  for (std::size_t k = 0; k < count; ++k) out.insert(out.end(), mean.begin(), mean.end());
  return out;
}

std::vector<double> step1_core(const Manifold& m, const FlatPatches& y, double sigma2) {
  const std::vector<double> mu = patch_mean(m, y);
  const auto frames = frames_at(m, mu, y.comps);
  const Eigen::MatrixXd l = logs_at(frames, y, m.dim());
  const ShrinkageOperator op(second_moment(l), sigma2);
  return restore(frames, op.matrix() * l, y.amb, m.dim());
}

std::vector<double> step2_core(const Manifold& m, const FlatPatches& y, const FlatPatches& oracle, double sigma2) {
  const std::vector<double> mu = patch_mean(m, y);
  const auto frames = frames_at(m, mu, y.comps);
  Eigen::MatrixXd l = logs_at(frames, y, m.dim());
  if (sigma2 > 0.0) {
    // C (C + s^2 I)^-1 l = l - s^2 (C + s^2 I)^-1 l, with C the oracle second moment.
    CovMatrix cov = second_moment(logs_at(frames, oracle, m.dim()));
    cov.diagonal().array() += sigma2;
    const Eigen::LLT<CovMatrix> llt(cov);
    if (llt.info() != Eigen::Success) throw ShapeError("step 2 covariance is not positive definite");
    const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(cov.rows(), cov.cols()));
    l -= sigma2 * (inv * l);
  }
  return restore(frames, l, y.amb, m.dim());
}

std::vector<ProductPoint> unflatten(const Manifold& m, const std::vector<double>& data, std::size_t count,
                                    std::size_t comps) {
  const std::size_t len = comps * static_cast<std::size_t>(m.ambient_len());
  std::vector<ProductPoint> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    out.emplace_back(m, comps,
                     std::vector<double>(data.begin() + static_cast<std::ptrdiff_t>(k * len),
                                         data.begin() + static_cast<std::ptrdiff_t>((k + 1) * len)));
  }
  return out;
}

void rethrow_member_cut(const MemberCut& mc) { throw CutLocusError(mc.what, mc.member); }

// ---------------------------------------------------------------------------
// Search

struct Candidate {
  double d;
  std::size_t order;
  GridIndex g;
};

struct Members {
  std::vector<GridIndex> list;
  bool reduced = false;
};

Members search(const ManifoldImage& img, GridIndex i, int s, int w, int k) {
  const int h = (s - 1) / 2;
  const int hw = (w - 1) / 2;
  if (i.row - h < 0 || i.col - h < 0 || i.row + h >= img.rows() || i.col + h >= img.cols()) {
    throw DomainError("reference patch at (" + std::to_string(i.row) + ", " + std::to_string(i.col) +
                      ") leaves the image");
  }
  const Manifold& m = img.manifold();
  const auto comps = static_cast<std::size_t>(s) * static_cast<std::size_t>(s);
  std::vector<TangentFrame> ref;
  ref.reserve(comps);
  for (int dc = 0; dc < s; ++dc)
    for (int dr = 0; dr < s; ++dr) ref.emplace_back(m, img.pixel(i.row - h + dr, i.col - h + dc));

  const int r0 = std::max(h, i.row - hw), r1 = std::min(img.rows() - 1 - h, i.row + hw);
  const int c0 = std::max(h, i.col - hw), c1 = std::min(img.cols() - 1 - h, i.col + hw);
  const bool euclid = m.kind() == ManifoldKind::Euclidean;
  const std::size_t amb = img.stride();
  std::vector<Candidate> cands;
  cands.reserve(static_cast<std::size_t>((r1 - r0 + 1) * (c1 - c0 + 1)));
  std::size_t order = 0;
  for (int c = c0; c <= c1; ++c) {
    for (int r = r0; r <= r1; ++r, ++order) {
      if (r == i.row && c == i.col) continue;
      double acc = 0.0;
      std::size_t j = 0;
      if (euclid) {
        for (int dc = 0; dc < s; ++dc) {
          for (int dr = 0; dr < s; ++dr, ++j) {
            const double* a = ref[j].base().data();
            const double* b = img.pixel(r - h + dr, c - h + dc).data();
            double sq = 0.0;
            for (std::size_t e = 0; e < amb; ++e) sq += (a[e] - b[e]) * (a[e] - b[e]);
            acc += sq;
          }
        }
      } else {
        for (int dc = 0; dc < s; ++dc)
          for (int dr = 0; dr < s; ++dr, ++j) acc += ref[j].sq_dist_to(img.pixel(r - h + dr, c - h + dc));
      }
      cands.push_back({acc, order, {r, c}});
    }
  }
  const auto less = [](const Candidate& a, const Candidate& b) { return a.d < b.d || (a.d == b.d && a.order < b.order); };
  const auto want = static_cast<std::size_t>(k - 1);
  Members out;
  out.reduced = cands.size() < want;
  const std::size_t take = std::min(want, cands.size());
  if (take < cands.size()) {
    std::nth_element(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(take), cands.end(), less);
  }
  std::sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(take), less);
  out.list.reserve(take + 1);
  out.list.push_back(i);
  for (std::size_t t = 0; t < take; ++t) out.list.push_back(cands[t].g);
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline

struct GroupOut {
  std::vector<GridIndex> members;  // those that survived
  std::vector<double> data;        // restored patches, member-major
};

// Restores one group, dropping members that hit a cut locus.
GroupOut run_group(const ManifoldImage& noisy, const ManifoldImage* oracle, std::vector<GridIndex> members, int s,
                   double gamma, double sigma2) {
  const Manifold& m = noisy.manifold();
  const GridIndex ref = members.front();
  for (;;) {
    try {
      const FlatPatches y = gather(noisy, members, s);
      const FlatTest t = flat_test(m, y, gamma, sigma2);
      GroupOut out;
      if (t.flat) {
        out.data = fill_flat(t.mean, y.count * y.comps);
      } else if (oracle == nullptr) {
        out.data = step1_core(m, y, sigma2);
      } else {
        out.data = step2_core(m, y, gather(*oracle, members, s), sigma2);
      }
      out.members = std::move(members);
      return out;
    } catch (const MemberCut& mc) {
      if (members.size() <= 1) {
        throw GroupError("group at (" + std::to_string(ref.row) + ", " + std::to_string(ref.col) +
                             ") lost every member to the cut locus: " + mc.what,
                         ref.row, ref.col);
      }
      members.erase(members.begin() + static_cast<std::ptrdiff_t>(mc.member));
    } catch (const GroupError&) {
      throw;
    } catch (const Error& e) {
      throw GroupError("group at (" + std::to_string(ref.row) + ", " + std::to_string(ref.col) + "): " + e.what(),
                       ref.row, ref.col);
    }
  }
}

std::vector<GridIndex> valid_centers(const ManifoldImage& img, int s) {
  const int h = (s - 1) / 2;
  std::vector<GridIndex> out;
  for (int c = h; c + h < img.cols(); ++c)
    for (int r = h; r + h < img.rows(); ++r) out.push_back({r, c});
  return out;
}

// One pass: match on `match`, restore `noisy` (with `oracle` for the second
// pass), aggregate.
ManifoldImage run_pass(const ManifoldImage& noisy, const ManifoldImage& match, const ManifoldImage* oracle, int s,
                       int w, int k, double gamma, double sigma2, bool accelerate, int threads, int& n_groups) {
  const Manifold& m = noisy.manifold();
  const std::vector<GridIndex> centers = valid_centers(noisy, s);
  std::vector<std::vector<GridIndex>> groups;

  if (accelerate) {
    std::vector<char> used(noisy.size(), 0);
    for (const GridIndex& c : centers) {
      if (used[noisy.index(c.row, c.col)]) continue;
      Members mem = search(match, c, s, w, k);
      for (const GridIndex& g : mem.list) used[noisy.index(g.row, g.col)] = 1;
      groups.push_back(std::move(mem.list));
    }
  } else {
    groups.resize(centers.size());
    parallel_for(centers.size(), threads, [&](std::size_t t) { groups[t] = search(match, centers[t], s, w, k).list; });
  }
  n_groups = static_cast<int>(groups.size());

  std::vector<GroupOut> outs(groups.size());
  parallel_for(groups.size(), threads, [&](std::size_t g) {
    outs[g] = run_group(noisy, oracle, std::move(groups[g]), s, gamma, sigma2);
  });

  // Per-pixel estimate lists in group order.
  const int h = (s - 1) / 2;
  const auto comps = static_cast<std::size_t>(s) * static_cast<std::size_t>(s);
  const std::size_t amb = noisy.stride();
  std::vector<std::size_t> start(noisy.size() + 1, 0);
  const auto for_each_estimate = [&](auto&& fn) {
    for (const GroupOut& go : outs) {
      for (std::size_t k2 = 0; k2 < go.members.size(); ++k2) {
        const GridIndex g = go.members[k2];
        std::size_t j = 0;
        for (int dc = 0; dc < s; ++dc)
          for (int dr = 0; dr < s; ++dr, ++j)
            fn(noisy.index(g.row - h + dr, g.col - h + dc), go.data.data() + (k2 * comps + j) * amb);
      }
    }
  };
  for_each_estimate([&](std::size_t p, const double*) { ++start[p + 1]; });
  for (std::size_t p = 0; p < noisy.size(); ++p) start[p + 1] += start[p];
  std::vector<const double*> est(start.back());
  {
    std::vector<std::size_t> fill(start.begin(), start.end() - 1);
    for_each_estimate([&](std::size_t p, const double* e) { est[fill[p]++] = e; });
  }

  ManifoldImage out = noisy;
  parallel_for(noisy.size(), threads, [&](std::size_t p) {
    const std::size_t n = start[p + 1] - start[p];
    if (n == 0) return;
    auto dst = out.pixel(p);
    if (n == 1) {
      std::copy(est[start[p]], est[start[p]] + amb, dst.begin());
      return;
    }
    std::vector<double> buf(n * amb);
    for (std::size_t q = 0; q < n; ++q) std::copy(est[start[p] + q], est[start[p] + q] + amb, buf.begin() + static_cast<std::ptrdiff_t>(q * amb));
    try {
      const KarcherResult r = karcher_mean(m, PointSet{buf.data(), n, amb}, {});
      std::copy(r.mean.begin(), r.mean.end(), dst.begin());
    } catch (const Error& e) {
      const int row = static_cast<int>(p / static_cast<std::size_t>(noisy.cols()));
      const int col = static_cast<int>(p % static_cast<std::size_t>(noisy.cols()));
      throw GroupError("aggregation at pixel (" + std::to_string(row) + ", " + std::to_string(col) + "): " + e.what(),
                       row, col);
    }
  });
  return out;
}

}  // namespace

DenoiseParams DenoiseParams::defaults_for(const Manifold& m, double sigma) {
  DenoiseParams p;
  p.sigma = sigma;
  const auto set = [&](int s1, int s2, int w1, int w2, int k1, int k2, double gamma) {
    p.s1 = s1, p.s2 = s2, p.w1 = w1, p.w2 = w2, p.k1 = k1, p.k2 = k2, p.gamma = gamma;
  };
  switch (m.kind()) {
    case ManifoldKind::Circle:
      set(9, 7, 119, 123, 186, 86, 1.1);
      break;
    case ManifoldKind::Sphere2:
      set(3, 5, 127, 127, 65, 54, 0.8);
      break;
    case ManifoldKind::Spd:
      if (m.param() == 3) {
        set(5, 5, 59, 59, 415, 415, 0.8);
        break;
      }
      if (m.param() == 2) {
        set(9, 9, 115, 115, 1038, 1038, 1.0);
        break;
      }
      [[fallthrough]];
    default: {
      const int k = 3 * 25 * m.dim();
      set(5, 5, 31, 31, k, k, 1.0);
    }
  }
  return p;
}

DenoiseParams DenoiseParams::fitted_to(int rows, int cols) const {
  DenoiseParams p = *this;
  int wmax = std::min(rows, cols);
  if (wmax % 2 == 0) --wmax;
  const auto fit = [&](int s, int& w, int& k) {
    w = std::min(w, wmax);
    const long cand = static_cast<long>(std::min(w, rows - s + 1)) * std::min(w, cols - s + 1);
    if (cand >= 1) k = static_cast<int>(std::min<long>(k, cand));
  };
  fit(p.s1, p.w1, p.k1);
  fit(p.s2, p.w2, p.k2);
  return p;
}

void DenoiseParams::check() const {
  if (!odd(s1) || !odd(s2)) throw DomainError("patch sides must be odd and positive");
  if (!odd(w1) || !odd(w2)) throw DomainError("window sides must be odd and positive");
  if (w1 <= s1 || w2 <= s2) throw DomainError("window side must exceed the patch side");
  if (k1 < 1 || k2 < 1) throw DomainError("group sizes must be at least 1");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be finite and non-negative");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be finite and non-negative");
  if (threads < 0) throw DomainError("thread count must be non-negative");
}

ProductPoint extract_patch(const ManifoldImage& image, GridIndex center, int s) {
  if (!odd(s)) throw DomainError("patch side must be odd and positive");
  const int h = (s - 1) / 2;
  if (center.row - h < 0 || center.col - h < 0 || center.row + h >= image.rows() || center.col + h >= image.cols()) {
    throw DomainError("patch at (" + std::to_string(center.row) + ", " + std::to_string(center.col) +
                      ") leaves the image");
  }
  FlatPatches f = gather(image, {center}, s);
  return ProductPoint(image.manifold(), f.comps, std::move(f.data));
}

void insert_patch(ManifoldImage& image, GridIndex center, const ProductPoint& patch) {
  const int s = static_cast<int>(std::lround(std::sqrt(static_cast<double>(patch.count))));
  if (static_cast<std::size_t>(s) * static_cast<std::size_t>(s) != patch.count || !odd(s)) {
    throw ShapeError("patch component count is not an odd square");
  }
  if (!(patch.manifold == image.manifold())) throw ShapeError("patch and image live on different manifolds");
  const int h = (s - 1) / 2;
  if (center.row - h < 0 || center.col - h < 0 || center.row + h >= image.rows() || center.col + h >= image.cols()) {
    throw DomainError("patch leaves the image");
  }
  std::size_t j = 0;
  for (int dc = 0; dc < s; ++dc)
    for (int dr = 0; dr < s; ++dr, ++j) image.set(center.row - h + dr, center.col - h + dc, patch.component(j));
}

PatchGroup find_similar(const ManifoldImage& image, GridIndex i, int s, int w, int k) {
  if (!odd(s) || !odd(w)) throw DomainError("patch and window sides must be odd");
  if (k < 1) throw DomainError("group size must be at least 1");
  Members mem = search(image, i, s, w, k);
  PatchGroup g;
  g.reference = i;
  g.reduced = mem.reduced;
  g.patches.reserve(mem.list.size());
  for (const GridIndex& c : mem.list) g.patches.push_back(extract_patch(image, c, s));
  g.members = std::move(mem.list);
  return g;
}

HomogeneousResult homogeneous_test(const PatchGroup& group, double gamma, double sigma2) {
  const FlatPatches y = flatten(group.patches);
  const Manifold m = group.patches[0].manifold;
  try {
    FlatTest t = flat_test(m, y, gamma, sigma2);
    return {t.flat, Point(m, std::move(t.mean)), t.variance};
  } catch (const MemberCut& mc) {
    rethrow_member_cut(mc);
  }
  return {};
}

std::vector<ProductPoint> denoise_group_step1(const PatchGroup& group, double sigma2) {
  if (sigma2 < 0.0) throw DomainError("negative noise variance");
  const FlatPatches y = flatten(group.patches);
  const Manifold m = group.patches[0].manifold;
  try {
    return unflatten(m, step1_core(m, y, sigma2), y.count, y.comps);
  } catch (const MemberCut& mc) {
    rethrow_member_cut(mc);
  }
  return {};
}

std::vector<ProductPoint> denoise_group_step2(const PatchGroup& noisy, const PatchGroup& oracle, double sigma2) {
  if (sigma2 < 0.0) throw DomainError("negative noise variance");
  if (noisy.members != oracle.members) throw ShapeError("step 2 groups must share their members");
  const FlatPatches y = flatten(noisy.patches);
  const FlatPatches o = flatten(oracle.patches);
  if (y.comps != o.comps || !(noisy.patches[0].manifold == oracle.patches[0].manifold)) {
    throw ShapeError("step 2 groups differ in patch shape");
  }
  const Manifold m = noisy.patches[0].manifold;
  try {
    return unflatten(m, step2_core(m, y, o, sigma2), y.count, y.comps);
  } catch (const MemberCut& mc) {
    rethrow_member_cut(mc);
  }
  return {};
}

NlmmseResult nlmmse(const ManifoldImage& noisy, const DenoiseParams& params) {
  params.check();
  const int need = std::max(params.w1, params.w2);
  if (noisy.rows() < need || noisy.cols() < need) {
    throw DomainError("image (" + std::to_string(noisy.rows()) + "x" + std::to_string(noisy.cols()) +
                      ") is smaller than the search window (" + std::to_string(need) + ")");
  }
  const double sigma2 = params.sigma * params.sigma;
  NlmmseResult res;
  res.oracle = run_pass(noisy, noisy, nullptr, params.s1, params.w1, params.k1, params.gamma, sigma2,
                        params.accelerate, params.threads, res.groups_step1);
  res.final = run_pass(noisy, res.oracle, &res.oracle, params.s2, params.w2, params.k2, params.gamma, sigma2,
                       params.accelerate, params.threads, res.groups_step2);
  return res;
}

double mse(const ManifoldImage& a, const ManifoldImage& b) {
  if (!(a.manifold() == b.manifold())) throw ShapeError("mse: images live on different manifolds");
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("mse: image dimensions differ");
  if (a.size() == 0) throw ShapeError("mse of empty images");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += sq_dist(a.manifold(), a.pixel(i), b.pixel(i));
  return acc / static_cast<double>(a.size());
}

}  // namespace mvd
