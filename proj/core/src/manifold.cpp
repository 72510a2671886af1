#include "mvd/manifold.hpp"

#include <Eigen/Dense>
#include <charconv>
#include <cmath>

#include "mvd/errors.hpp"
#include "mvd/geometry.hpp"

namespace mvd {

Manifold Manifold::euclidean(int d) {
  if (d < 1 || d > kMaxAmbient) {
    throw ShapeError("Euclidean dimension must lie in [1, " + std::to_string(kMaxAmbient) + "]");
  }
  return Manifold(ManifoldKind::Euclidean, d);
}

Manifold Manifold::spd(int r) {
  if (r < 1 || r > 3) throw ShapeError("SPD(r) supports r in {1, 2, 3}");
  return Manifold(ManifoldKind::Spd, r);
}

namespace {

int parse_int(std::string_view s) {
  int v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ShapeError("bad manifold tag parameter '" + std::string(s) + "'");
  return v;
}

}  // namespace

Manifold Manifold::from_tag(std::string_view tag) {
  if (tag == "s1") return circle();
  if (tag == "s2") return sphere2();
  if (tag == "h2") return hyperbolic2();
  if (tag == "simplex:1") return simplex1();
  if (tag.starts_with("eucl:")) return euclidean(parse_int(tag.substr(5)));
  if (tag.starts_with("spd:")) return spd(parse_int(tag.substr(4)));
  throw ShapeError("unknown manifold tag '" + std::string(tag) + "'");
}

std::string Manifold::tag() const {
  switch (kind_) {
    case ManifoldKind::Euclidean: return "eucl:" + std::to_string(param_);
    case ManifoldKind::Circle: return "s1";
    case ManifoldKind::Sphere2: return "s2";
    case ManifoldKind::Spd: return "spd:" + std::to_string(param_);
    case ManifoldKind::Simplex1: return "simplex:1";
    case ManifoldKind::Hyperbolic2: return "h2";
  }
  return {};
}

bool validate(const Manifold& m, std::span<const double> x) noexcept {
  if (x.size() != static_cast<std::size_t>(m.ambient_len())) return false;
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  switch (m.kind()) {
    case ManifoldKind::Euclidean:
      return true;
    case ManifoldKind::Circle:
    case ManifoldKind::Sphere2: {
      double n2 = 0.0;
      for (double v : x) n2 += v * v;
      return std::abs(std::sqrt(n2) - 1.0) <= kUnitNormTol;
    }
    case ManifoldKind::Spd: {
      const int r = m.param();
      Eigen::MatrixXd a(r, r);
      double scale = 1.0;
      for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) {
          a(i, j) = x[static_cast<std::size_t>(i * r + j)];
          scale = std::max(scale, std::abs(a(i, j)));
        }
      }
      for (int i = 0; i < r; ++i) {
        for (int j = i + 1; j < r; ++j) {
          if (std::abs(a(i, j) - a(j, i)) > kUnitNormTol * scale) return false;
        }
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
      return es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0.0;
    }
    case ManifoldKind::Simplex1:
      return x[0] > 0.0 && x[1] > 0.0 && std::abs(x[0] + x[1] - 1.0) <= kUnitNormTol;
    case ManifoldKind::Hyperbolic2: {
      const double q = x[0] * x[0] + x[1] * x[1] - x[2] * x[2];
      return x[2] > 0.0 && std::abs(q + 1.0) <= kHyperboloidTol * std::max(1.0, x[2] * x[2]);
    }
  }
  return false;
}

namespace {

void check_same_shape(const ProductPoint& a, const ProductPoint& b) {
  if (!(a.manifold == b.manifold) || a.count != b.count || a.coords.size() != b.coords.size()) {
    throw ShapeError("product points differ in manifold or component count");
  }
}

}  // namespace

double product_dist(const ProductPoint& a, const ProductPoint& b) {
  check_same_shape(a, b);
  double acc = 0.0;
  for (std::size_t j = 0; j < a.count; ++j) acc += sq_dist(a.manifold, a.component(j), b.component(j));
  return std::sqrt(acc);
}

ProductPoint product_exp(const ProductPoint& base, std::span<const double> v) {
  const auto d = static_cast<std::size_t>(base.manifold.dim());
  if (v.size() != base.count * d) throw ShapeError("tangent vector length does not match count*dim");
  ProductPoint out(base.manifold, base.count);
  for (std::size_t j = 0; j < base.count; ++j) {
    TangentFrame frame(base.manifold, base.component(j));
    frame.exp(v.subspan(j * d, d), out.component(j));
  }
  return out;
}

std::vector<double> product_log(const ProductPoint& base, const ProductPoint& q) {
  check_same_shape(base, q);
  const auto d = static_cast<std::size_t>(base.manifold.dim());
  std::vector<double> v(base.count * d);
  for (std::size_t j = 0; j < base.count; ++j) {
    TangentFrame frame(base.manifold, base.component(j));
    try {
      frame.log(q.component(j), std::span<double>(v).subspan(j * d, d));
    } catch (const CutLocusError& e) {
      throw CutLocusError(e.what(), j);
    }
  }
  return v;
}

}  // namespace mvd
