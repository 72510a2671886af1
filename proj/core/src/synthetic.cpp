#include "mvd/synthetic.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <numbers>

#include "mvd/errors.hpp"
#include "mvd/rng.hpp"

namespace mvd {
namespace {

using std::numbers::pi;

// Normalised coordinates of pixel (r, c): u down, v right, both in [0, 1).
struct Pos {
  double u, v;
};

ManifoldImage build(const Manifold& m, int rows, int cols, const std::function<void(Pos, int, int, double*)>& f) {
  std::vector<double> data(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) *
                           static_cast<std::size_t>(m.ambient_len()));
  double* p = data.data();
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c, p += m.ambient_len()) {
      f({(r + 0.5) / rows, (c + 0.5) / cols}, r, c, p);
    }
  }
  return ManifoldImage(m, rows, cols, std::move(data));
}

double sq(double x) { return x * x; }

// Region label shared by the scalar generators:
//   1 rectangle, 2 disc, 3 ramp triangle, 4 paraboloid disc, 0 background.
int shape_of(Pos p, double aspect) {
  if (p.u >= 0.12 && p.u < 0.38 && p.v >= 0.10 && p.v < 0.40) return 1;
  if (sq(p.u - 0.70) + sq((p.v - 0.28) * aspect) < sq(0.16)) return 2;
  if (p.u >= 0.10 && p.u < 0.45 && p.v >= 0.55 && p.v < 0.92 && (p.v - 0.55) > (p.u - 0.10)) return 3;
  if (sq(p.u - 0.72) + sq((p.v - 0.72) * aspect) < sq(0.20)) return 4;
  return 0;
}

// A scalar field in roughly [-1, 1] with the shape layout above.
double scalar_field(Pos p, double aspect, const double jitter[4]) {
  switch (shape_of(p, aspect)) {
    case 1:
      return 0.8 + jitter[0];
    case 2:
      return -0.7 + jitter[1];
    case 3:
      return -0.6 + 3.0 * (p.v - 0.55) + jitter[2];
    case 4:
      return 0.5 + jitter[3] - 12.0 * (sq(p.u - 0.72) + sq((p.v - 0.72) * aspect));
    default:
      return 0.2 * std::sin(2.0 * pi * p.u) + 0.3 * p.v - 0.1;
  }
}

void jitters(std::uint64_t seed, double out[4], double scale) {
  CounterRng rng(seed, 0);
  for (int i = 0; i < 4; ++i) out[i] = scale * (2.0 * rng.uniform() - 1.0);
}

Eigen::Matrix3d rotation(double a, double b, double c) {
  return (Eigen::AngleAxisd(a, Eigen::Vector3d::UnitZ()) * Eigen::AngleAxisd(b, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(c, Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

void store_spd(const Eigen::MatrixXd& a, double* out) {
  const auto r = a.rows();
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < r; ++j) out[i * r + j] = 0.5 * (a(i, j) + a(j, i));
}

// Tensor field: constant blocks with fixed spectra and a band whose
// orientation and anisotropy vary smoothly. Eigenvalues stay in [0.3, 4].
ManifoldImage spd_blocks(int r, int rows, int cols, std::uint64_t seed) {
  double jit[4];
  jitters(seed, jit, 0.1);
  const double aspect = static_cast<double>(cols) / rows;
  struct Spec {
    double l[3];
    double a, b, c;
  };
  const Spec blocks[5] = {
      {{1.0, 1.0, 1.0}, 0.0, 0.0, 0.0},           // background
      {{3.0 + jit[0], 0.6, 1.2}, 0.4, 0.3, 0.1},  // rectangle
      {{0.5, 2.5 + jit[1], 1.5}, -0.8, 0.5, 0.9}, // disc
      {{2.0, 0.5, 0.8}, 0.0, 0.0, 0.0},           // band (rotated per pixel)
      {{1.8 + jit[3], 1.8, 0.4}, 1.2, -0.4, 0.2}, // paraboloid disc
  };
  return build(Manifold::spd(r), rows, cols, [&](Pos p, int, int, double* out) {
    const int s = shape_of(p, aspect);
    const Spec& sp = blocks[s];
    double l[3] = {sp.l[0], sp.l[1], sp.l[2]};
    double a = sp.a, b = sp.b, c = sp.c;
    if (s == 3) {
      a = pi * (p.v - 0.55) / 0.37 + jit[2];
      l[0] = 1.0 + 2.0 * (p.v - 0.55) / 0.37;
    } else if (s == 0) {
      l[0] = 1.0 + 0.4 * std::sin(pi * p.u);
      a = 0.5 * p.v;
    }
    if (r == 2) {
      const Eigen::Matrix2d q = Eigen::Rotation2Dd(a).toRotationMatrix();
      const Eigen::Matrix2d m = q * Eigen::Vector2d(l[0], l[1]).asDiagonal() * q.transpose();
      store_spd(m, out);
    } else {
      const Eigen::Matrix3d q = rotation(a, b, c);
      const Eigen::Matrix3d m = q * Eigen::Vector3d(l[0], l[1], l[2]).asDiagonal() * q.transpose();
      store_spd(m, out);
    }
  });
}

struct Vortex {
  double u, v, radius, spin;
};

constexpr Vortex kVortices[3] = {{0.30, 0.30, 0.20, 1.0}, {0.70, 0.65, 0.16, -1.0}, {0.25, 0.78, 0.12, 1.0}};
constexpr double kVortexTilt = 1.2;

}  // namespace

const std::vector<std::string>& generator_names() {
  static const std::vector<std::string> names = {"s1-shapes",     "s2-vortex", "spd2-blocks",  "spd3-blocks",
                                                 "simplex-ramps", "h2-blobs",  "eucl1-shapes", "eucl3-shapes"};
  return names;
}

std::vector<VortexCore> s2_vortex_cores(int rows, int cols) {
  const double n = std::min(rows, cols);
  std::vector<VortexCore> out;
  for (const Vortex& v : kVortices) out.push_back({v.u * rows - 0.5, v.v * cols - 0.5, 0.5 * v.radius * n});
  return out;
}

ManifoldImage generate(const std::string& name, int rows, int cols, std::uint64_t seed) {
  if (rows < 8 || cols < 8) throw DomainError("generated images must be at least 8 x 8");
  const double aspect = static_cast<double>(cols) / rows;
  double jit[4];

  if (name == "s1-shapes") {
    jitters(seed, jit, 0.2);
    return build(Manifold::circle(), rows, cols, [&](Pos p, int, int, double* out) {
      const double t = 2.0 * scalar_field(p, aspect, jit);
      out[0] = std::cos(t);
      out[1] = std::sin(t);
    });
  }
  if (name == "s2-vortex") {
    jitters(seed, jit, 0.1);
    const double n = std::min(rows, cols);
    return build(Manifold::sphere2(), rows, cols, [&](Pos p, int r, int c, double* out) {
      const double polar = 0.9 + 0.5 * p.u + jit[0];
      const double az = 0.3 + 1.2 * p.v + jit[1];
      Eigen::Vector3d x(std::sin(polar) * std::cos(az), std::sin(polar) * std::sin(az), std::cos(polar));
      const Eigen::Vector3d t1 = Eigen::Vector3d::UnitZ().cross(x).normalized();
      const Eigen::Vector3d t2 = x.cross(t1);
      for (const Vortex& v : kVortices) {
        const double dr = r - (v.u * rows - 0.5);
        const double dc = c - (v.v * cols - 0.5);
        const double rho = std::hypot(dr, dc) / (v.radius * n);
        if (rho >= 1.0) continue;
        const double tilt = kVortexTilt * sq(1.0 - rho);
        const double dir = std::atan2(dr, dc) + v.spin * 0.5 * pi;
        x = std::cos(tilt) * x + std::sin(tilt) * (std::cos(dir) * t1 + std::sin(dir) * t2);
      }
      x.normalize();
      out[0] = x(0);
      out[1] = x(1);
      out[2] = x(2);
    });
  }
  if (name == "spd2-blocks") return spd_blocks(2, rows, cols, seed);
  if (name == "spd3-blocks") return spd_blocks(3, rows, cols, seed);
  if (name == "simplex-ramps") {
    jitters(seed, jit, 0.1);
    return build(Manifold::simplex1(), rows, cols, [&](Pos p, int, int, double* out) {
      const double t = 0.5 * pi + 0.9 * scalar_field(p, aspect, jit);
      const double a = sq(std::cos(0.5 * t)), b = sq(std::sin(0.5 * t));
      out[0] = a / (a + b);
      out[1] = b / (a + b);
    });
  }
  if (name == "h2-blobs") {
    jitters(seed, jit, 0.1);
    return build(Manifold::hyperbolic2(), rows, cols, [&](Pos p, int, int, double* out) {
      const double rho = 0.8 + 0.6 * scalar_field(p, aspect, jit);
      const double phi = pi * (p.v - 0.3) + (shape_of(p, aspect) == 2 ? 1.5 : 0.0);
      out[0] = std::sinh(rho) * std::cos(phi);
      out[1] = std::sinh(rho) * std::sin(phi);
      out[2] = std::sqrt(1.0 + out[0] * out[0] + out[1] * out[1]);
    });
  }
  if (name == "eucl1-shapes" || name == "eucl3-shapes") {
    jitters(seed, jit, 0.1);
    const int d = name == "eucl1-shapes" ? 1 : 3;
    return build(Manifold::euclidean(d), rows, cols, [&](Pos p, int, int, double* out) {
      const double f = scalar_field(p, aspect, jit);
      out[0] = f;
      if (d == 3) {
        out[1] = 0.5 * f + 0.3 * p.u;
        out[2] = -f + 0.2 * std::cos(2.0 * pi * p.v);
      }
    });
  }
  throw DomainError("unknown generator '" + name + "'");
}

}  // namespace mvd
