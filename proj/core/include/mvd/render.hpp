#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvd/image.hpp"

namespace mvd {

enum class RenderStyle { Auto, Svg, Ppm };

/// Parses "auto", "svg" or "ppm"; throws DomainError otherwise.
RenderStyle parse_render_style(const std::string& s);

/// SVG 1.1 glyph grid for SPD(2) and SPD(3) images, one <ellipse> per
/// pixel. SPD(2): semi-axes along the eigenvectors with lengths proportional
/// to the eigenvalues. SPD(3): the outline of the ellipsoid A * (unit ball)
/// projected onto the image plane, i.e. the ellipse of the top-left 2x2
/// block of A^2. Throws DomainError for other manifolds.
std::string render_svg(const ManifoldImage& image);

/// Binary PPM (P6), one RGB pixel per image pixel:
///   s1           hue wheel on the angle
///   s2           (x + 1) / 2 per channel
///   eucl:1/3     min-max scaled grey / RGB (other d: first channel)
///   simplex:1    grey level x1
///   h2           Poincare disc coordinates (x1, x2) / (1 + x3) as R, G
///   spd:r        grey level of log det, min-max scaled
std::vector<std::uint8_t> render_ppm(const ManifoldImage& image);

/// Auto picks SVG for SPD(2)/SPD(3) and PPM otherwise. Throws Error on IO
/// failure.
void render(const ManifoldImage& image, RenderStyle style, const std::string& path);

}  // namespace mvd
