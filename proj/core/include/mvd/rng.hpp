#pragma once

#include <cstdint>

namespace mvd {

/// Counter-based random stream keyed by (seed, stream).
///
/// Draw number c of stream (seed, k) is
///   key   = mix(seed ^ mix(k + 0x9E3779B97F4A7C15))
///   u64_c = mix(key + (c + 1) * 0x9E3779B97F4A7C15)
/// where mix is the SplitMix64 finalizer. Uniform doubles take the top 53
/// bits; normals use the Box-Muller cosine branch on two uniforms. The
/// output depends only on (seed, stream, draw index), so per-pixel streams
/// can be consumed in any order or from any thread.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;
  double normal() noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

}  // namespace mvd
