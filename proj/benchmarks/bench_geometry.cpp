#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mvd/geometry.hpp"
#include "mvd/noise.hpp"
#include "mvd/stats.hpp"

namespace {

using namespace mvd;

Manifold pick(int which) {
  switch (which) {
    case 0: return Manifold::circle();
    case 1: return Manifold::sphere2();
    case 2: return Manifold::spd(3);
    case 3: return Manifold::simplex1();
    default: return Manifold::hyperbolic2();
  }
}

std::vector<Point> cloud(const Manifold& m, int n, double sigma) {
  std::vector<double> base(static_cast<std::size_t>(m.ambient_len()), 0.0);
  switch (m.kind()) {
    case ManifoldKind::Spd:
      for (int i = 0; i < m.param(); ++i) base[static_cast<std::size_t>(i * m.param() + i)] = 1.0;
      break;
    case ManifoldKind::Simplex1: base = {0.5, 0.5}; break;
    case ManifoldKind::Hyperbolic2: base = {0.0, 0.0, 1.0}; break;
    default: base[0] = 1.0;
  }
  const Point mu(m, base);
  std::vector<Point> pts;
  for (int k = 0; k < n; ++k) {
    CounterRng rng(17, static_cast<std::uint64_t>(k));
    pts.push_back(sample_tangent_gaussian(mu, sigma, rng));
  }
  return pts;
}

void BM_ExpLog(benchmark::State& state) {
  const Manifold m = pick(static_cast<int>(state.range(0)));
  const auto pts = cloud(m, 64, 0.3);
  const TangentFrame frame(m, pts[0].coords);
  std::vector<double> v(static_cast<std::size_t>(m.dim()));
  std::vector<double> out(static_cast<std::size_t>(m.ambient_len()));
  std::size_t k = 1;
  for (auto _ : state) {
    frame.log(pts[k].coords, v);
    frame.exp(v, out);
    benchmark::DoNotOptimize(out.data());
    k = k % 63 + 1;
  }
  state.SetLabel(m.tag());
}
BENCHMARK(BM_ExpLog)->DenseRange(0, 4);

void BM_SqDist(benchmark::State& state) {
  const Manifold m = pick(static_cast<int>(state.range(0)));
  const auto pts = cloud(m, 64, 0.3);
  std::size_t k = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sq_dist(m, pts[0].coords, pts[k].coords));
    k = k % 63 + 1;
  }
  state.SetLabel(m.tag());
}
BENCHMARK(BM_SqDist)->DenseRange(0, 4);

void BM_Karcher(benchmark::State& state) {
  const Manifold m = pick(static_cast<int>(state.range(0)));
  const auto pts = cloud(m, 100, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(karcher_mean(pts));
  state.SetLabel(m.tag());
}
BENCHMARK(BM_Karcher)->DenseRange(0, 4);

void BM_Shrinkage(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 g(3);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd b(n, n);
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = normal(g);
  const CovMatrix c = b * b.transpose() / static_cast<double>(n);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = normal(g);
  for (auto _ : state) benchmark::DoNotOptimize(shrinkage_apply(c, 0.1, v));
}
BENCHMARK(BM_Shrinkage)->Arg(9)->Arg(27)->Arg(54)->Arg(150);

}  // namespace
