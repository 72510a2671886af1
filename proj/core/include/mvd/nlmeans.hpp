#pragma once

#include "mvd/image.hpp"

namespace mvd {

struct NlMeansParams {
  int s = 5;
  int w = 21;
  int k = 50;
  /// Spatial spread of the Gaussian weights inside a patch.
  double delta = 2.0;
  /// Scale of the similarity weights exp(-d^2 / (2 tau^2)).
  double tau = 1.0;
  int threads = 1;

  void check() const;
};

/// Gaussian-weighted squared patch distance between the patches centred at
/// i and j: sum over offsets k of exp(-|k|^2 / (2 delta^2)) dist(y_{i+k}, y_{j+k})^2.
/// Offsets falling outside the image for either patch are skipped and the
/// sum is rescaled by (total weight) / (weight of the offsets used).
double nl_patch_distance(const ManifoldImage& image, GridIndex i, GridIndex j, int s, double delta);

/// Nonlocal means on a manifold: every pixel becomes the weighted Karcher
/// mean of the centres of its k most similar patches in a w x w window
/// (itself included). The centre weight is the largest weight of the other
/// members, or 1 when there are none.
ManifoldImage nlmeans(const ManifoldImage& image, const NlMeansParams& params);

}  // namespace mvd
