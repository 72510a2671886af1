#include <benchmark/benchmark.h>

#include "mvd/denoise.hpp"
#include "mvd/noise.hpp"
#include "mvd/synthetic.hpp"

namespace {

using namespace mvd;

void BM_FindSimilar(benchmark::State& state) {
  NoiseSpec spec;
  spec.sigma = 0.125;
  const ManifoldImage noisy = add_noise(generate("spd3-blocks", 48, 48, 1), spec, 1);
  for (auto _ : state) benchmark::DoNotOptimize(find_similar(noisy, {24, 24}, 5, 21, 100));
}
BENCHMARK(BM_FindSimilar)->Unit(benchmark::kMicrosecond);

void BM_Nlmmse(benchmark::State& state) {
  const bool accel = state.range(0) != 0;
  NoiseSpec spec;
  spec.sigma = 0.2;
  const ManifoldImage noisy = add_noise(generate("s2-vortex", 32, 32, 1), spec, 1);
  DenoiseParams p = DenoiseParams::defaults_for(noisy.manifold(), spec.sigma).fitted_to(32, 32);
  p.accelerate = accel;
  for (auto _ : state) benchmark::DoNotOptimize(nlmmse(noisy, p));
  state.SetLabel(accel ? "accelerated" : "full");
}
BENCHMARK(BM_Nlmmse)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace
