#pragma once

#include <array>
#include <span>
#include <vector>

#include "mvd/manifold.hpp"

namespace mvd {

// Tolerances shared by validation and the cut-locus predicates.
inline constexpr double kUnitNormTol = 1e-12;
inline constexpr double kHyperboloidTol = 1e-10;
inline constexpr double kAntipodalSlack = 1e-12;
inline constexpr double kSpdLogEigenFloor = 1e-14;

/// Geodesic distance. Throws ShapeError when the lengths do not match `m`.
double dist(const Manifold& m, std::span<const double> x, std::span<const double> y);
double sq_dist(const Manifold& m, std::span<const double> x, std::span<const double> y);
double dist(const Point& x, const Point& y);

/// Riemannian metric at x applied to ambient tangent vectors u, v.
double metric_inner(const Manifold& m, std::span<const double> x, std::span<const double> u,
                    std::span<const double> v);

/// Exponential and logarithmic maps at a fixed base point, expressed in the
/// canonical orthonormal basis of the tangent space there.
///
/// Building the frame does the per-base-point work once (the basis, and
/// x^{1/2}, x^{-1/2} for SPD), so repeated log/exp calls at the same base
/// point are cheap. Canonical bases:
///   Euclidean  standard basis
///   Circle     (-x2, x1)
///   Sphere2    the two ambient axes least aligned with x, projected onto
///              the tangent plane and Gram-Schmidt'ed in axis order
///   Spd(r)     x^{1/2} E x^{1/2} with E = e_i e_i^T (diagonal entries first)
///              then (e_i e_j^T + e_j e_i^T)/sqrt(2) for i < j
///   Simplex1   sqrt(x1 x2) (1, -1)
///   Hyperbolic e1, e2 projected onto the tangent plane, Gram-Schmidt'ed in
///              the Minkowski form
class TangentFrame {
 public:
  TangentFrame(const Manifold& m, std::span<const double> base);

  const Manifold& manifold() const noexcept { return m_; }
  std::span<const double> base() const noexcept {
    return {base_.data(), static_cast<std::size_t>(m_.ambient_len())};
  }

  /// Coordinates of log_base(y), written to `v` (length dim). Throws
  /// CutLocusError when y is (numerically) antipodal on S^1/S^2 and
  /// DomainError when an SPD argument is not positive definite.
  void log(std::span<const double> y, std::span<double> v) const;

  /// exp_base(h(v)) written to `out` (length ambient_len), re-projected onto
  /// the manifold. v == 0 returns the base point bit for bit. Throws
  /// DomainError when a Simplex1 image lands on the simplex boundary.
  void exp(std::span<const double> v, std::span<double> out) const;

  /// sq_dist(base, y), reusing the cached SPD inverse square root.
  double sq_dist_to(std::span<const double> y) const;

  /// Ambient basis vectors, dim rows of ambient_len entries each.
  std::vector<std::vector<double>> basis() const;

 private:
  Manifold m_;
  std::array<double, kMaxAmbient> base_{};
  // Per-kind cached data: sphere/hyperbolic basis vectors, SPD square root
  // and inverse square root, simplex angle.
  std::array<double, 18> aux_{};
};

/// Orthonormal basis of the tangent space at `base`.
struct TangentBasis {
  Point base;
  std::vector<std::vector<double>> vectors;
};

TangentBasis tangent_basis(const Point& x);

Point exp_map(const Point& x, std::span<const double> v);
std::vector<double> log_map(const Point& x, const Point& y);

/// Angle parameter t in (0, pi) of a Simplex1 point x = (cos^2(t/2), sin^2(t/2)).
double simplex_angle(std::span<const double> x);

}  // namespace mvd
