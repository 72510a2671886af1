#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvd/image.hpp"

namespace mvd {

/// Names accepted by generate():
///   s1-shapes      angles: smooth background, constant rectangle and disc,
///                  a linear ramp and a paraboloid
///   s2-vortex      unit vectors: smooth background with swirling vortices
///   spd2-blocks    2x2 SPD: constant tensor blocks plus a rotating band
///   spd3-blocks    3x3 SPD: the same layout in three dimensions
///   simplex-ramps  Delta_1: constant blocks and ramps
///   h2-blobs       hyperboloid: smooth field with constant discs
///   eucl1-shapes   scalar piecewise constant + ramps
///   eucl3-shapes   three-channel version
/// The seed shifts shape values slightly; the layout scales with the size.
const std::vector<std::string>& generator_names();

/// Throws DomainError for an unknown name or a grid smaller than 8 x 8.
ManifoldImage generate(const std::string& name, int rows, int cols, std::uint64_t seed);

/// Radius (in pixels) of the vortex cores of s2-vortex at this size, and
/// their centres, for tests that need to exclude them.
struct VortexCore {
  double row, col, radius;
};
std::vector<VortexCore> s2_vortex_cores(int rows, int cols);

}  // namespace mvd
