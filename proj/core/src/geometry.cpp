#include "mvd/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "mvd/errors.hpp"

namespace mvd {
namespace {

using std::numbers::pi;

void check_len(const Manifold& m, std::span<const double> x, const char* what) {
  if (x.size() != static_cast<std::size_t>(m.ambient_len())) {
    throw ShapeError(std::string(what) + ": expected " + std::to_string(m.ambient_len()) +
                     " ambient coordinates for " + m.tag() + ", got " + std::to_string(x.size()));
  }
}

double minkowski(const double* a, const double* b) { return a[0] * b[0] + a[1] * b[1] - a[2] * b[2]; }

// ---------------------------------------------------------------------------
// SPD(r) helpers. Matrices are symmetric, so row- and column-major storage of
// the ambient coordinates coincide.

template <int R>
using Mat = Eigen::Matrix<double, R, R>;

template <int R>
Mat<R> load(const double* p) {
  return Eigen::Map<const Mat<R>>(p);
}

template <int R>
void store(const Mat<R>& a, double* p) {
  const Mat<R> s = 0.5 * (a + a.transpose());
  Eigen::Map<Mat<R>>{p} = s;
}

template <int R, typename F>
Mat<R> sym_apply(const Mat<R>& a, F&& f) {
  Eigen::SelfAdjointEigenSolver<Mat<R>> es(a);
  if (es.info() != Eigen::Success) throw DomainError("symmetric eigendecomposition failed");
  Eigen::Matrix<double, R, 1> lam = es.eigenvalues();
  for (int i = 0; i < R; ++i) lam(i) = f(lam(i));
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

// Coordinates of a symmetric matrix in the orthonormal basis
// {e_i e_i^T} U {(e_i e_j^T + e_j e_i^T)/sqrt 2 : i < j}.
template <int R>
void sym_to_coords(const Mat<R>& a, double* c) {
  int k = 0;
  for (int i = 0; i < R; ++i) c[k++] = a(i, i);
  for (int i = 0; i < R; ++i) {
    for (int j = i + 1; j < R; ++j) c[k++] = std::numbers::sqrt2 * 0.5 * (a(i, j) + a(j, i));
  }
}

template <int R>
Mat<R> coords_to_sym(const double* c) {
  Mat<R> a;
  int k = 0;
  for (int i = 0; i < R; ++i) a(i, i) = c[k++];
  for (int i = 0; i < R; ++i) {
    for (int j = i + 1; j < R; ++j) {
      a(i, j) = a(j, i) = c[k++] / std::numbers::sqrt2;
    }
  }
  return a;
}

template <int R>
double spd_sq_dist(const double* x, const double* y) {
  if constexpr (R == 1) {
    if (!(x[0] > 0.0) || !(y[0] > 0.0)) throw DomainError("SPD(1) distance of a non-positive value");
    const double l = std::log(y[0] / x[0]);
    return l * l;
  } else {
    Eigen::LLT<Mat<R>> llt(load<R>(x));
    if (llt.info() != Eigen::Success) throw DomainError("SPD distance: base point is not positive definite");
    Mat<R> c = llt.matrixL().solve(load<R>(y));
    c = llt.matrixL().solve(c.transpose().eval());
    c = 0.5 * (c + c.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat<R>> es;
    es.computeDirect(c, Eigen::EigenvaluesOnly);
    double acc = 0.0;
    for (int i = 0; i < R; ++i) {
      const double lam = es.eigenvalues()(i);
      if (!(lam > 0.0)) throw DomainError("SPD distance: argument is not positive definite");
      const double l = std::log(lam);
      acc += l * l;
    }
    return acc;
  }
}

template <int R>
void spd_frame_init(const double* x, double* aux) {
  const Mat<R> a = load<R>(x);
  Eigen::SelfAdjointEigenSolver<Mat<R>> es(a);
  if (es.info() != Eigen::Success || !(es.eigenvalues().minCoeff() > 0.0)) {
    throw DomainError("SPD base point is not positive definite");
  }
  const auto& v = es.eigenvectors();
  const Eigen::Matrix<double, R, 1> s = es.eigenvalues().cwiseSqrt();
  const Mat<R> sq = v * s.asDiagonal() * v.transpose();
  const Mat<R> isq = v * s.cwiseInverse().asDiagonal() * v.transpose();
  Eigen::Map<Mat<R>>{aux} = sq;
  Eigen::Map<Mat<R>>{aux + 9} = isq;
}

template <int R>
void spd_log(const double* aux, const double* y, double* v) {
  const Mat<R> isq = load<R>(aux + 9);
  Mat<R> a = isq * load<R>(y) * isq;
  a = 0.5 * (a + a.transpose()).eval();
  const Mat<R> l = sym_apply<R>(a, [](double lam) {
    if (!(lam > kSpdLogEigenFloor)) throw DomainError("matrix logarithm of a non positive definite matrix");
    return std::log(lam);
  });
  sym_to_coords<R>(l, v);
}

template <int R>
double spd_sq_dist_cached(const double* aux, const double* y) {
  const Mat<R> isq = load<R>(aux + 9);
  Mat<R> a = isq * load<R>(y) * isq;
  a = 0.5 * (a + a.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat<R>> es;
  es.computeDirect(a, Eigen::EigenvaluesOnly);
  double acc = 0.0;
  for (int i = 0; i < R; ++i) {
    const double lam = es.eigenvalues()(i);
    if (!(lam > 0.0)) throw DomainError("SPD distance: argument is not positive definite");
    const double l = std::log(lam);
    acc += l * l;
  }
  return acc;
}

template <int R>
void spd_exp(const double* aux, const double* v, double* out) {
  const Mat<R> sq = load<R>(aux);
  const Mat<R> e = sym_apply<R>(coords_to_sym<R>(v), [](double lam) { return std::exp(lam); });
  store<R>(sq * e * sq, out);
}

template <int R>
double spd_inner(const double* x, const double* u, const double* v) {
  const Mat<R> xi = load<R>(x).inverse();
  return (load<R>(u) * xi * load<R>(v) * xi).trace();
}

template <typename F>
decltype(auto) spd_dispatch(int r, F&& f) {
  switch (r) {
    case 1: return f(std::integral_constant<int, 1>{});
    case 2: return f(std::integral_constant<int, 2>{});
    default: return f(std::integral_constant<int, 3>{});
  }
}

// Signed angle of a Simplex1 point, x = (cos^2(t/2), sin^2(t/2)).
double simplex_t(const double* x) { return 2.0 * std::atan2(std::sqrt(x[1]), std::sqrt(x[0])); }

}  // namespace

double simplex_angle(std::span<const double> x) {
  if (x.size() != 2) throw ShapeError("simplex_angle expects two coordinates");
  return simplex_t(x.data());
}

double sq_dist(const Manifold& m, std::span<const double> x, std::span<const double> y) {
  check_len(m, x, "dist");
  check_len(m, y, "dist");
  switch (m.kind()) {
    case ManifoldKind::Euclidean: {
      double acc = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        acc += d * d;
      }
      return acc;
    }
    case ManifoldKind::Circle: {
      const double a = std::atan2(std::abs(x[0] * y[1] - x[1] * y[0]), x[0] * y[0] + x[1] * y[1]);
      return a * a;
    }
    case ManifoldKind::Sphere2: {
      const double cx = x[1] * y[2] - x[2] * y[1];
      const double cy = x[2] * y[0] - x[0] * y[2];
      const double cz = x[0] * y[1] - x[1] * y[0];
      const double a = std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), x[0] * y[0] + x[1] * y[1] + x[2] * y[2]);
      return a * a;
    }
    case ManifoldKind::Spd:
      // The other formulas are exactly symmetric in floating point; this one is
      // not, so evaluate with the lexicographically smaller argument first.
      if (std::lexicographical_compare(y.begin(), y.end(), x.begin(), x.end())) std::swap(x, y);
      return spd_dispatch(m.param(), [&](auto r) { return spd_sq_dist<decltype(r)::value>(x.data(), y.data()); });
    case ManifoldKind::Simplex1: {
      const double a = simplex_t(x.data()) - simplex_t(y.data());
      return a * a;
    }
    case ManifoldKind::Hyperbolic2: {
      // |x - y|_M^2 = 4 sinh^2(d/2); stable for nearby points unlike arcosh.
      const double diff[3] = {x[0] - y[0], x[1] - y[1], x[2] - y[2]};
      double q = minkowski(diff, diff);
      if (q < 0.0) {
        if (q < -kAntipodalSlack * (1.0 + x[2] * y[2])) throw DomainError("hyperbolic distance of off-manifold points");
        q = 0.0;
      }
      const double a = 2.0 * std::asinh(0.5 * std::sqrt(q));
      return a * a;
    }
  }
  return 0.0;
}

double dist(const Manifold& m, std::span<const double> x, std::span<const double> y) {
  return std::sqrt(sq_dist(m, x, y));
}

double dist(const Point& x, const Point& y) {
  if (!(x.manifold == y.manifold)) throw ShapeError("dist: points live on different manifolds");
  return dist(x.manifold, x.coords, y.coords);
}

double metric_inner(const Manifold& m, std::span<const double> x, std::span<const double> u,
                    std::span<const double> v) {
  check_len(m, x, "metric_inner");
  check_len(m, u, "metric_inner");
  check_len(m, v, "metric_inner");
  switch (m.kind()) {
    case ManifoldKind::Euclidean:
    case ManifoldKind::Circle:
    case ManifoldKind::Sphere2: {
      double acc = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
      return acc;
    }
    case ManifoldKind::Spd:
      return spd_dispatch(m.param(), [&](auto r) { return spd_inner<decltype(r)::value>(x.data(), u.data(), v.data()); });
    case ManifoldKind::Simplex1:
      return u[0] * v[0] / x[0] + u[1] * v[1] / x[1];
    case ManifoldKind::Hyperbolic2:
      return minkowski(u.data(), v.data());
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

TangentFrame::TangentFrame(const Manifold& m, std::span<const double> base) : m_(m) {
  check_len(m, base, "TangentFrame");
  std::copy(base.begin(), base.end(), base_.begin());
  const double* x = base_.data();
  double* aux = aux_.data();
  switch (m.kind()) {
    case ManifoldKind::Euclidean:
      break;
    case ManifoldKind::Circle:
      aux[0] = -x[1];
      aux[1] = x[0];
      break;
    case ManifoldKind::Sphere2: {
      // Two axes least aligned with x; ties go to the lower axis index.
      std::array<int, 3> idx{0, 1, 2};
      std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return std::abs(x[a]) < std::abs(x[b]); });
      const int a0 = std::min(idx[0], idx[1]);
      const int a1 = std::max(idx[0], idx[1]);
      double* e1 = aux;
      double* e2 = aux + 3;
      for (int i = 0; i < 3; ++i) {
        e1[i] = (i == a0 ? 1.0 : 0.0) - x[a0] * x[i];
        e2[i] = (i == a1 ? 1.0 : 0.0) - x[a1] * x[i];
      }
      const double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
      for (int i = 0; i < 3; ++i) e1[i] /= n1;
      const double p = e1[0] * e2[0] + e1[1] * e2[1] + e1[2] * e2[2];
      for (int i = 0; i < 3; ++i) e2[i] -= p * e1[i];
      const double n2 = std::sqrt(e2[0] * e2[0] + e2[1] * e2[1] + e2[2] * e2[2]);
      for (int i = 0; i < 3; ++i) e2[i] /= n2;
      break;
    }
    case ManifoldKind::Spd:
      spd_dispatch(m.param(), [&](auto r) { spd_frame_init<decltype(r)::value>(x, aux); });
      break;
    case ManifoldKind::Simplex1: {
      aux[0] = simplex_t(x);
      const double s = std::sqrt(x[0] * x[1]);
      aux[1] = s;
      aux[2] = -s;
      break;
    }
    case ManifoldKind::Hyperbolic2: {
      double* b1 = aux;
      double* b2 = aux + 3;
      for (int i = 0; i < 3; ++i) {
        b1[i] = (i == 0 ? 1.0 : 0.0) + x[0] * x[i];
        b2[i] = (i == 1 ? 1.0 : 0.0) + x[1] * x[i];
      }
      const double n1 = std::sqrt(minkowski(b1, b1));
      for (int i = 0; i < 3; ++i) b1[i] /= n1;
      const double p = minkowski(b1, b2);
      for (int i = 0; i < 3; ++i) b2[i] -= p * b1[i];
      const double n2 = std::sqrt(minkowski(b2, b2));
      for (int i = 0; i < 3; ++i) b2[i] /= n2;
      break;
    }
  }
}

void TangentFrame::log(std::span<const double> y, std::span<double> v) const {
  check_len(m_, y, "log");
  if (v.size() != static_cast<std::size_t>(m_.dim())) throw ShapeError("log: output length must equal dim");
  if (std::equal(y.begin(), y.end(), base_.begin())) {
    std::fill(v.begin(), v.end(), 0.0);
    return;
  }
  const double* x = base_.data();
  const double* aux = aux_.data();
  switch (m_.kind()) {
    case ManifoldKind::Euclidean:
      for (std::size_t i = 0; i < y.size(); ++i) v[i] = y[i] - x[i];
      return;
    case ManifoldKind::Circle: {
      const double dot = x[0] * y[0] + x[1] * y[1];
      if (dot <= -1.0 + kAntipodalSlack) throw CutLocusError("log on S^1: antipodal points");
      v[0] = std::atan2(aux[0] * y[0] + aux[1] * y[1], dot);
      return;
    }
    case ManifoldKind::Sphere2: {
      const double dot = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
      if (dot <= -1.0 + kAntipodalSlack) throw CutLocusError("log on S^2: antipodal points");
      const double d[3] = {y[0] - x[0], y[1] - x[1], y[2] - x[2]};
      const double c1 = aux[0] * d[0] + aux[1] * d[1] + aux[2] * d[2];
      const double c2 = aux[3] * d[0] + aux[4] * d[1] + aux[5] * d[2];
      const double s = std::hypot(c1, c2);
      if (s == 0.0) {
        v[0] = v[1] = 0.0;
        return;
      }
      const double theta = std::atan2(s, dot);
      v[0] = theta * c1 / s;
      v[1] = theta * c2 / s;
      return;
    }
    case ManifoldKind::Spd:
      spd_dispatch(m_.param(), [&](auto r) { spd_log<decltype(r)::value>(aux, y.data(), v.data()); });
      return;
    case ManifoldKind::Simplex1:
      v[0] = aux[0] - simplex_t(y.data());
      return;
    case ManifoldKind::Hyperbolic2: {
      const double d[3] = {y[0] - x[0], y[1] - x[1], y[2] - x[2]};
      const double c1 = minkowski(d, aux);
      const double c2 = minkowski(d, aux + 3);
      const double s = std::hypot(c1, c2);
      if (s == 0.0) {
        v[0] = v[1] = 0.0;
        return;
      }
      const double q = std::max(0.0, minkowski(d, d));
      const double r = 2.0 * std::asinh(0.5 * std::sqrt(q));
      v[0] = r * c1 / s;
      v[1] = r * c2 / s;
      return;
    }
  }
}

void TangentFrame::exp(std::span<const double> v, std::span<double> out) const {
  if (v.size() != static_cast<std::size_t>(m_.dim())) throw ShapeError("exp: tangent length must equal dim");
  if (out.size() != static_cast<std::size_t>(m_.ambient_len())) throw ShapeError("exp: output length mismatch");
  const double* x = base_.data();
  const double* aux = aux_.data();
  if (std::all_of(v.begin(), v.end(), [](double c) { return c == 0.0; })) {
    std::copy(x, x + out.size(), out.begin());
    return;
  }
  switch (m_.kind()) {
    case ManifoldKind::Euclidean:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + v[i];
      return;
    case ManifoldKind::Circle: {
      const double c = std::cos(v[0]);
      const double s = std::sin(v[0]);
      double p[2] = {c * x[0] + s * aux[0], c * x[1] + s * aux[1]};
      const double n = std::hypot(p[0], p[1]);
      out[0] = p[0] / n;
      out[1] = p[1] / n;
      return;
    }
    case ManifoldKind::Sphere2: {
      const double n = std::hypot(v[0], v[1]);
      const double c = std::cos(n);
      const double s = std::sin(n) / n;
      double p[3];
      for (int i = 0; i < 3; ++i) p[i] = c * x[i] + s * (v[0] * aux[i] + v[1] * aux[3 + i]);
      const double nn = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
      for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>(i)] = p[i] / nn;
      return;
    }
    case ManifoldKind::Spd:
      spd_dispatch(m_.param(), [&](auto r) { spd_exp<decltype(r)::value>(aux, v.data(), out.data()); });
      return;
    case ManifoldKind::Simplex1: {
      // The geodesic folds back at the boundary (cos^2 is even and
      // 2pi-periodic); only images exactly on the boundary are rejected.
      const double t = std::abs(std::remainder(aux[0] - v[0], 2.0 * pi));
      if (t < 1e-12 || t > pi - 1e-12) throw DomainError("exp leaves open simplex");
      const double c = std::cos(0.5 * t);
      const double s = std::sin(0.5 * t);
      const double a = c * c;
      const double b = s * s;
      out[0] = a / (a + b);
      out[1] = b / (a + b);
      return;
    }
    case ManifoldKind::Hyperbolic2: {
      const double n = std::hypot(v[0], v[1]);
      const double c = std::cosh(n);
      const double s = std::sinh(n) / n;
      double p[3];
      for (int i = 0; i < 3; ++i) p[i] = c * x[i] + s * (v[0] * aux[i] + v[1] * aux[3 + i]);
      out[0] = p[0];
      out[1] = p[1];
      out[2] = std::sqrt(1.0 + p[0] * p[0] + p[1] * p[1]);
      return;
    }
  }
}

double TangentFrame::sq_dist_to(std::span<const double> y) const {
  if (m_.kind() == ManifoldKind::Spd && m_.param() > 1) {
    check_len(m_, y, "dist");
    return spd_dispatch(m_.param(), [&](auto r) { return spd_sq_dist_cached<decltype(r)::value>(aux_.data(), y.data()); });
  }
  return sq_dist(m_, base(), y);
}

std::vector<std::vector<double>> TangentFrame::basis() const {
  const auto d = static_cast<std::size_t>(m_.dim());
  const auto a = static_cast<std::size_t>(m_.ambient_len());
  std::vector<std::vector<double>> out(d, std::vector<double>(a, 0.0));
  const double* aux = aux_.data();
  switch (m_.kind()) {
    case ManifoldKind::Euclidean:
      for (std::size_t i = 0; i < d; ++i) out[i][i] = 1.0;
      break;
    case ManifoldKind::Circle:
      out[0] = {aux[0], aux[1]};
      break;
    case ManifoldKind::Sphere2:
    case ManifoldKind::Hyperbolic2:
      out[0] = {aux[0], aux[1], aux[2]};
      out[1] = {aux[3], aux[4], aux[5]};
      break;
    case ManifoldKind::Simplex1:
      out[0] = {aux[1], aux[2]};
      break;
    case ManifoldKind::Spd: {
      const int r = m_.param();
      Eigen::MatrixXd sq(r, r);
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) sq(i, j) = aux[j * r + i];
      std::vector<double> c(d, 0.0);
      for (std::size_t k = 0; k < d; ++k) {
        std::fill(c.begin(), c.end(), 0.0);
        c[k] = 1.0;
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(r, r);
        std::size_t idx = 0;
        for (int i = 0; i < r; ++i) e(i, i) = c[idx++];
        for (int i = 0; i < r; ++i)
          for (int j = i + 1; j < r; ++j) e(i, j) = e(j, i) = c[idx++] / std::numbers::sqrt2;
        const Eigen::MatrixXd b = sq * e * sq;
        for (int i = 0; i < r; ++i)
          for (int j = 0; j < r; ++j) out[k][static_cast<std::size_t>(i * r + j)] = b(i, j);
      }
      break;
    }
  }
  return out;
}

TangentBasis tangent_basis(const Point& x) {
  TangentFrame frame(x.manifold, x.coords);
  return {x, frame.basis()};
}

Point exp_map(const Point& x, std::span<const double> v) {
  TangentFrame frame(x.manifold, x.coords);
  Point out(x.manifold, std::vector<double>(static_cast<std::size_t>(x.manifold.ambient_len())));
  frame.exp(v, out.coords);
  return out;
}

std::vector<double> log_map(const Point& x, const Point& y) {
  if (!(x.manifold == y.manifold)) throw ShapeError("log: points live on different manifolds");
  TangentFrame frame(x.manifold, x.coords);
  std::vector<double> v(static_cast<std::size_t>(x.manifold.dim()));
  frame.log(y.coords, v);
  return v;
}

}  // namespace mvd
