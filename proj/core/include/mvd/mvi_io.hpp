#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mvd/image.hpp"

namespace mvd {

// .mvi layout, all integers and reals little-endian:
//   "MVI1"                        4 bytes
//   manifold tag, ASCII, then NUL e.g. "spd:2\0"
//   rows (N1), cols (N2)          u32 each
//   payload                       rows*cols*ambient_len IEEE-754 doubles,
//                                 row-major pixels, ambient order per pixel
// Nothing may follow the payload.

std::vector<std::uint8_t> encode_mvi(const ManifoldImage& image);

/// Throws ParseError (with the byte offset) for malformed input and
/// ValidationError (with the pixel index) for pixels off their manifold.
ManifoldImage decode_mvi(const std::vector<std::uint8_t>& bytes);

/// Throws ValidationError if a pixel is invalid, Error on IO failure.
void write_mvi(const ManifoldImage& image, const std::string& path);
ManifoldImage read_mvi(const std::string& path);

}  // namespace mvd
