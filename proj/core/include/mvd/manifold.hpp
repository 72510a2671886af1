#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mvd {

enum class ManifoldKind { Euclidean, Circle, Sphere2, Spd, Simplex1, Hyperbolic2 };

/// Largest number of stored reals per point (SPD(3) stores 9; Euclidean is
/// capped at this many coordinates).
inline constexpr int kMaxAmbient = 16;

/// Which manifold a pixel lives on, with its intrinsic dimension and the
/// number of reals stored per point.
///
///   kind          dim          ambient  layout
///   Euclidean(d)  d            d        plain vector
///   Circle        1            2        unit vector in R^2
///   Sphere2       2            3        unit vector in R^3
///   Spd(r)        r(r+1)/2     r*r      row-major symmetric matrix
///   Simplex1      1            2        positive entries summing to one
///   Hyperbolic2   2            3        hyperboloid sheet, x3 > 0
class Manifold {
 public:
  Manifold() = default;  // Euclidean(1)

  static Manifold euclidean(int d);
  static Manifold circle() { return Manifold(ManifoldKind::Circle, 0); }
  static Manifold sphere2() { return Manifold(ManifoldKind::Sphere2, 0); }
  /// r in {1, 2, 3}; SPD(1) is the positive half-line.
  static Manifold spd(int r);
  static Manifold simplex1() { return Manifold(ManifoldKind::Simplex1, 0); }
  static Manifold hyperbolic2() { return Manifold(ManifoldKind::Hyperbolic2, 0); }

  /// Parses "eucl:<d>", "s1", "s2", "spd:<r>", "simplex:1" or "h2".
  /// Throws ShapeError on anything else.
  static Manifold from_tag(std::string_view tag);
  std::string tag() const;

  ManifoldKind kind() const noexcept { return kind_; }
  /// d for Euclidean, r for SPD, 0 otherwise.
  int param() const noexcept { return param_; }
  int dim() const noexcept {
    switch (kind_) {
      case ManifoldKind::Euclidean: return param_;
      case ManifoldKind::Circle: return 1;
      case ManifoldKind::Sphere2: return 2;
      case ManifoldKind::Spd: return param_ * (param_ + 1) / 2;
      case ManifoldKind::Simplex1: return 1;
      case ManifoldKind::Hyperbolic2: return 2;
    }
    return 0;
  }
  int ambient_len() const noexcept {
    switch (kind_) {
      case ManifoldKind::Euclidean: return param_;
      case ManifoldKind::Circle: return 2;
      case ManifoldKind::Sphere2: return 3;
      case ManifoldKind::Spd: return param_ * param_;
      case ManifoldKind::Simplex1: return 2;
      case ManifoldKind::Hyperbolic2: return 3;
    }
    return 0;
  }

  bool operator==(const Manifold&) const = default;

 private:
  Manifold(ManifoldKind kind, int param) : kind_(kind), param_(param) {}

  ManifoldKind kind_ = ManifoldKind::Euclidean;
  int param_ = 1;
};

/// A point stored in ambient coordinates.
struct Point {
  Manifold manifold;
  std::vector<double> coords;

  Point() = default;
  Point(Manifold m, std::vector<double> c) : manifold(m), coords(std::move(c)) {}
  Point(Manifold m, std::span<const double> c) : manifold(m), coords(c.begin(), c.end()) {}
};

/// A point of the power manifold M^count, e.g. an s x s patch with
/// count = s^2. Components are stored back to back in ambient layout.
struct ProductPoint {
  Manifold manifold;
  std::size_t count = 0;
  std::vector<double> coords;

  ProductPoint() = default;
  ProductPoint(Manifold m, std::size_t n) : manifold(m), count(n), coords(n * m.ambient_len()) {}
  ProductPoint(Manifold m, std::size_t n, std::vector<double> c)
      : manifold(m), count(n), coords(std::move(c)) {}

  std::size_t tangent_dim() const { return count * static_cast<std::size_t>(manifold.dim()); }

  std::span<const double> component(std::size_t j) const {
    const auto a = static_cast<std::size_t>(manifold.ambient_len());
    return {coords.data() + j * a, a};
  }
  std::span<double> component(std::size_t j) {
    const auto a = static_cast<std::size_t>(manifold.ambient_len());
    return {coords.data() + j * a, a};
  }
};

/// True iff `coords` is a valid point of `m` (see the tolerances in
/// geometry.hpp). Never throws.
bool validate(const Manifold& m, std::span<const double> coords) noexcept;
inline bool validate(const Point& p) noexcept { return validate(p.manifold, p.coords); }

/// sqrt of the sum of squared component distances.
double product_dist(const ProductPoint& a, const ProductPoint& b);

/// Componentwise exp; `v` holds count*dim coordinates, component-major.
ProductPoint product_exp(const ProductPoint& base, std::span<const double> v);

/// Componentwise log in component-major tangent coordinates. A cut-locus
/// error carries the index of the failing component.
std::vector<double> product_log(const ProductPoint& base, const ProductPoint& q);

}  // namespace mvd
