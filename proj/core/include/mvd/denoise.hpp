#pragma once

#include <vector>

#include "mvd/image.hpp"
#include "mvd/manifold.hpp"
#include "mvd/stats.hpp"

namespace mvd {

struct DenoiseParams {
  int s1 = 5, s2 = 5;
  int w1 = 31, w2 = 31;
  int k1 = 75, k2 = 75;
  double gamma = 1.0;
  double sigma = 0.0;
  bool accelerate = true;
  /// Worker threads for group restoration and aggregation; 0 picks the
  /// hardware concurrency. The output does not depend on this value.
  int threads = 1;

  /// Per-manifold starting values: patch/window/group sizes tuned for each
  /// manifold family, with K = 3 s^2 d where no tuned value exists.
  static DenoiseParams defaults_for(const Manifold& m, double sigma);

  /// Shrinks windows to the largest odd side fitting a rows x cols image and
  /// caps K at the number of patches in that window.
  DenoiseParams fitted_to(int rows, int cols) const;

  /// Throws DomainError unless s, w are odd, w > s, K >= 1, gamma >= 0 and
  /// sigma >= 0.
  void check() const;
};

/// s x s patch centred at `center`, flattened column-major: component
/// dc * s + dr holds pixel (center.row - h + dr, center.col - h + dc),
/// h = (s - 1) / 2. Throws DomainError if the patch leaves the grid.
ProductPoint extract_patch(const ManifoldImage& image, GridIndex center, int s);

/// Writes `patch` back into the grid (inverse of extract_patch).
void insert_patch(ManifoldImage& image, GridIndex center, const ProductPoint& patch);

struct PatchGroup {
  GridIndex reference;
  /// reference first, then the nearest candidates.
  std::vector<GridIndex> members;
  std::vector<ProductPoint> patches;
  /// Fewer than K candidates were available.
  bool reduced = false;
};

/// The reference patch plus its K-1 nearest patches (product distance)
/// among the centres of a w x w window around i, clipped to the centres
/// whose patch lies inside the image. Ties are broken by column-major
/// candidate order.
PatchGroup find_similar(const ManifoldImage& image, GridIndex i, int s, int w, int k);

struct HomogeneousResult {
  bool flat = false;
  Point mean;
  double variance = 0.0;
};

/// Karcher mean of every pixel of every patch in the group and the pooled
/// variance sum dist^2 / (d K s^2) around it; flat iff variance <= gamma sigma^2.
HomogeneousResult homogeneous_test(const PatchGroup& group, double gamma, double sigma2);

/// exp_mu(S log_mu(y_j)) for every member, with mu the patch Karcher mean,
/// Sigma the covariance of the logs and S the MMSE shrinkage of Sigma.
std::vector<ProductPoint> denoise_group_step1(const PatchGroup& group, double sigma2);

/// Second pass: mu from the noisy patches, Sigma from the oracle patches
/// around mu plus sigma^2 I, shrinkage applied to the noisy logs. Both groups
/// must list the same members.
std::vector<ProductPoint> denoise_group_step2(const PatchGroup& noisy, const PatchGroup& oracle, double sigma2);

struct NlmmseResult {
  ManifoldImage oracle;
  ManifoldImage final;
  int groups_step1 = 0;
  int groups_step2 = 0;
};

/// Two-pass nonlocal MMSE denoiser. Reference centres are scanned
/// column-major; with params.accelerate every member centre of a processed
/// group stops being a reference for the rest of that pass. A member whose
/// log hits the cut locus is dropped from its group. Each pixel is the
/// unweighted Karcher mean of all its restored estimates, reduced in group
/// order. Group failures are rethrown as GroupError.
NlmmseResult nlmmse(const ManifoldImage& noisy, const DenoiseParams& params);

/// Mean squared geodesic distance between two images.
double mse(const ManifoldImage& a, const ManifoldImage& b);

}  // namespace mvd
