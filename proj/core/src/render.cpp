#include "mvd/render.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

#include "mvd/errors.hpp"
#include "mvd/geometry.hpp"

namespace mvd {
namespace {

using std::numbers::pi;

constexpr double kCell = 12.0;

std::uint8_t to_byte(double x) {
  return static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(x, 0.0, 1.0)));
}

void hsv_to_rgb(double h, double s, double v, double rgb[3]) {
  h = h - std::floor(h);
  const double k[3] = {5.0, 3.0, 1.0};
  for (int i = 0; i < 3; ++i) {
    const double t = std::fmod(k[i] + 6.0 * h, 6.0);
    rgb[i] = v - v * s * std::clamp(std::min(t, 4.0 - t), 0.0, 1.0);
  }
}

// Semi-axes (a >= b) and rotation in degrees of the ellipse x^T M^{-1} x = 1
// for a symmetric positive 2x2 matrix M given as its principal radii squared.
struct Ellipse {
  double a, b, angle;
};

Ellipse ellipse_from_radii2(const Eigen::Matrix2d& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
  const double l0 = std::max(es.eigenvalues()(0), 0.0);
  const double l1 = std::max(es.eigenvalues()(1), 0.0);
  const Eigen::Vector2d v = es.eigenvectors().col(1);
  // v = (x, y) in matrix coordinates (row, col); SVG x is the column.
  return {std::sqrt(l1), std::sqrt(l0), std::atan2(v(0), v(1)) * 180.0 / pi};
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", std::abs(x) < 5e-4 ? 0.0 : x);
  return buf;
}

}  // namespace

RenderStyle parse_render_style(const std::string& s) {
  if (s == "auto") return RenderStyle::Auto;
  if (s == "svg") return RenderStyle::Svg;
  if (s == "ppm") return RenderStyle::Ppm;
  throw DomainError("unknown render style '" + s + "' (expected auto, svg or ppm)");
}

std::string render_svg(const ManifoldImage& image) {
  const Manifold& m = image.manifold();
  if (m.kind() != ManifoldKind::Spd || m.param() < 2) throw DomainError("SVG glyphs need an SPD(2) or SPD(3) image");
  const int r = m.param();
  std::vector<Ellipse> glyphs(image.size());
  double largest = 0.0;
  for (std::size_t p = 0; p < image.size(); ++p) {
    const auto x = image.pixel(p);
    Eigen::Matrix2d shape;
    if (r == 2) {
      Eigen::Matrix2d a;
      a << x[0], x[1], x[2], x[3];
      shape = a * a;  // semi-axes equal to the eigenvalues
    } else {
      Eigen::Matrix3d a;
      a << x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7], x[8];
      shape = (a * a).topLeftCorner<2, 2>();
    }
    shape = 0.5 * (shape + shape.transpose()).eval();
    glyphs[p] = ellipse_from_radii2(shape);
    largest = std::max(largest, glyphs[p].a);
  }
  const double scale = largest > 0.0 ? 0.45 * kCell / largest : 1.0;

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt(kCell * image.cols()) +
         "\" height=\"" + fmt(kCell * image.rows()) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int row = 0; row < image.rows(); ++row) {
    for (int col = 0; col < image.cols(); ++col) {
      const Ellipse& e = glyphs[image.index(row, col)];
      const double cx = kCell * (col + 0.5), cy = kCell * (row + 0.5);
      double rgb[3];
      hsv_to_rgb(std::fmod(e.angle + 360.0, 180.0) / 180.0, e.a > 0.0 ? 1.0 - e.b / e.a : 0.0, 0.85, rgb);
      char color[8];
      std::snprintf(color, sizeof color, "#%02x%02x%02x", to_byte(rgb[0]), to_byte(rgb[1]), to_byte(rgb[2]));
      out += "<ellipse cx=\"" + fmt(cx) + "\" cy=\"" + fmt(cy) + "\" rx=\"" + fmt(scale * e.a) + "\" ry=\"" +
             fmt(scale * e.b) + "\" transform=\"rotate(" + fmt(e.angle) + " " + fmt(cx) + " " + fmt(cy) +
             ")\" fill=\"" + color + "\" stroke=\"black\" stroke-width=\"0.3\"/>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

std::vector<std::uint8_t> render_ppm(const ManifoldImage& image) {
  const Manifold& m = image.manifold();
  const std::size_t n = image.size();
  std::vector<double> rgb(3 * n, 0.0);
  const auto minmax_scale = [&](std::vector<double>& v) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double x : v) lo = std::min(lo, x), hi = std::max(hi, x);
    for (double& x : v) x = hi > lo ? (x - lo) / (hi - lo) : 0.5;
  };

  switch (m.kind()) {
    case ManifoldKind::Circle:
      for (std::size_t p = 0; p < n; ++p) {
        const auto x = image.pixel(p);
        hsv_to_rgb(std::atan2(x[1], x[0]) / (2.0 * pi), 1.0, 1.0, &rgb[3 * p]);
      }
      break;
    case ManifoldKind::Sphere2:
      for (std::size_t p = 0; p < n; ++p)
        for (int c = 0; c < 3; ++c) rgb[3 * p + static_cast<std::size_t>(c)] = 0.5 * (image.pixel(p)[static_cast<std::size_t>(c)] + 1.0);
      break;
    case ManifoldKind::Euclidean: {
      const int chans = m.param() == 3 ? 3 : 1;
      for (int c = 0; c < chans; ++c) {
        std::vector<double> v(n);
        for (std::size_t p = 0; p < n; ++p) v[p] = image.pixel(p)[static_cast<std::size_t>(c)];
        minmax_scale(v);
        for (std::size_t p = 0; p < n; ++p) {
          if (chans == 3) {
            rgb[3 * p + static_cast<std::size_t>(c)] = v[p];
          } else {
            rgb[3 * p] = rgb[3 * p + 1] = rgb[3 * p + 2] = v[p];
          }
        }
      }
      break;
    }
    case ManifoldKind::Simplex1:
      for (std::size_t p = 0; p < n; ++p) rgb[3 * p] = rgb[3 * p + 1] = rgb[3 * p + 2] = image.pixel(p)[0];
      break;
    case ManifoldKind::Hyperbolic2:
      for (std::size_t p = 0; p < n; ++p) {
        const auto x = image.pixel(p);
        rgb[3 * p] = 0.5 * (x[0] / (1.0 + x[2]) + 1.0);
        rgb[3 * p + 1] = 0.5 * (x[1] / (1.0 + x[2]) + 1.0);
        rgb[3 * p + 2] = 0.5;
      }
      break;
    case ManifoldKind::Spd: {
      const int r = m.param();
      std::vector<double> v(n);
      for (std::size_t p = 0; p < n; ++p) {
        Eigen::MatrixXd a(r, r);
        for (int i = 0; i < r; ++i)
          for (int j = 0; j < r; ++j) a(i, j) = image.pixel(p)[static_cast<std::size_t>(i * r + j)];
        v[p] = std::log(std::max(a.determinant(), std::numeric_limits<double>::min()));
      }
      minmax_scale(v);
      for (std::size_t p = 0; p < n; ++p) rgb[3 * p] = rgb[3 * p + 1] = rgb[3 * p + 2] = v[p];
      break;
    }
  }

  const std::string header = "P6\n" + std::to_string(image.cols()) + " " + std::to_string(image.rows()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + 3 * n);
  for (double x : rgb) out.push_back(to_byte(x));
  return out;
}

void render(const ManifoldImage& image, RenderStyle style, const std::string& path) {
  const Manifold& m = image.manifold();
  if (style == RenderStyle::Auto) {
    style = m.kind() == ManifoldKind::Spd && m.param() >= 2 ? RenderStyle::Svg : RenderStyle::Ppm;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  if (style == RenderStyle::Svg) {
    const std::string svg = render_svg(image);
    f.write(svg.data(), static_cast<std::streamsize>(svg.size()));
  } else {
    const auto ppm = render_ppm(image);
    f.write(reinterpret_cast<const char*>(ppm.data()), static_cast<std::streamsize>(ppm.size()));
  }
  if (!f) throw Error("write to '" + path + "' failed");
}

}  // namespace mvd
