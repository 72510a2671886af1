#pragma once

#include "mvd/denoise.hpp"
#include "mvd/image.hpp"

namespace mvd {

/// Two-step nonlocal MMSE (NL-Bayes style) denoiser for vector-valued
/// images, written directly in R^d: arithmetic patch means, sample
/// covariances, restoration y -> mu + (Sigma - sigma^2 I) Sigma^{-1} (y - mu)
/// and aggregation by plain averaging.
///
/// Patch search, homogeneous test, scan order and acceleration follow the
/// same rules as nlmmse(), so on Euclidean images the two agree up to
/// rounding. Throws ShapeError for non-Euclidean images.
NlmmseResult euclidean_nlmmse(const ManifoldImage& noisy, const DenoiseParams& params);

}  // namespace mvd
