#pragma once

// Geometry and classifier formulas written once over a scalar type T that is
// either double (inference) or ad::Var (training, gradient checks).

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "curvednet/error.hpp"
#include "curvednet/tape.hpp"

namespace curvednet {

inline constexpr double kDefaultXi = 1e-5;
/// |atanh argument| never exceeds this.
inline constexpr double kAtanhLimit = 1.0 - 1e-12;
inline constexpr double kZeroNorm = 1e-30;
inline constexpr double kSingularDenominator = 1e-12;

inline double value_of(double x) noexcept { return x; }
inline double value_of(const ad::Var& v) noexcept { return v.value(); }

inline void note_boundary(double, double) noexcept {}
inline void note_boundary(const ad::Var& v, double distance) noexcept {
  v.tape()->note_boundary_distance(distance);
}

inline double lift(double, double c) noexcept { return c; }
inline ad::Var lift(const ad::Var& like, double c) { return like.tape()->constant(c); }

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimMismatch, "dot operands differ in length");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double affine(std::span<const double> w, std::span<const double> x, double bias) {
  return bias + dot(w, x);
}

template <class T>
T relu(const T& x) {
  note_boundary(x, std::abs(value_of(x)));
  if (value_of(x) > 0.0) return x;
  return lift(x, 0.0);
}

/// Read-only row-major matrix over scalar T.
template <class T>
struct MatView {
  std::span<const T> data;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<const T> row(std::size_t i) const { return data.subspan(i * cols, cols); }
};

namespace kernels {

template <class T>
using Vec = std::vector<T>;

template <class T>
T norm(std::span<const T> x) {
  using std::sqrt;
  return sqrt(dot(x, x));
}

template <class T>
Vec<T> scaled(std::span<const T> x, const T& s) {
  Vec<T> out;
  out.reserve(x.size());
  for (const T& v : x) out.push_back(v * s);
  return out;
}

template <class T>
Vec<T> negated(std::span<const T> x) {
  Vec<T> out;
  out.reserve(x.size());
  for (const T& v : x) out.push_back(-v);
  return out;
}

/// x / (sqrt(k) ||x||), k > 0.
template <class T>
Vec<T> sphere_project(std::span<const T> x, double k) {
  const T n = norm(x);
  if (value_of(n) < kZeroNorm) throw Error(ErrorCode::ZeroVector, "cannot project the zero vector");
  const T s = 1.0 / (std::sqrt(k) * n);
  return scaled(x, s);
}

/// Clip into the ball of radius 1/|k|; points inside (or on) the ball pass
/// through unchanged, points outside are rescaled to (1 - xi)/|k|.
template <class T>
Vec<T> ball_clip(std::span<const T> x, double k, double xi) {
  const double radius = 1.0 / std::abs(k);
  const T n = norm(x);
  note_boundary(n, std::abs(value_of(n) - radius));
  if (value_of(n) <= radius) return Vec<T>(x.begin(), x.end());
  const T s = ((1.0 - xi) / std::abs(k)) / n;
  return scaled(x, s);
}

/// Moebius addition without re-clipping.
template <class T>
Vec<T> mobius_add(std::span<const T> x, std::span<const T> y, double k) {
  if (x.size() != y.size()) throw Error(ErrorCode::DimMismatch, "mobius_add operand dims");
  const double c = std::abs(k);
  const T xy = dot(x, y);
  const T x2 = dot(x, x);
  const T y2 = dot(y, y);
  const T coef_x = 1.0 + 2.0 * c * xy + c * y2;
  const T coef_y = 1.0 - c * x2;
  const T den = 1.0 + 2.0 * c * xy + (c * c) * (x2 * y2);
  Vec<T> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back((coef_x * x[i] + coef_y * y[i]) / den);
  return out;
}

/// atanh with its argument clamped to [-kAtanhLimit, kAtanhLimit].
template <class T>
T clamped_atanh(const T& a) {
  using std::atanh;
  const double v = value_of(a);
  note_boundary(a, kAtanhLimit - std::abs(v));
  if (v > kAtanhLimit) return lift(a, std::atanh(kAtanhLimit));
  if (v < -kAtanhLimit) return lift(a, -std::atanh(kAtanhLimit));
  return atanh(a);
}

template <class T>
T geodesic_dist(std::span<const T> x, std::span<const T> y, double k) {
  const double c = std::abs(k);
  const Vec<T> neg_x = negated(x);
  const Vec<T> d = mobius_add<T>(neg_x, y, k);
  const T dn2 = dot(std::span<const T>(d), std::span<const T>(d));
  if (value_of(dn2) == 0.0) return lift(dn2, 0.0);
  using std::sqrt;
  const T arg = std::sqrt(c) * sqrt(dn2);
  return (2.0 / std::sqrt(c)) * clamped_atanh(arg);
}

/// Distance to the ball origin, (2/sqrt|k|) atanh(sqrt|k| ||x||).
template <class T>
T distance_to_origin(std::span<const T> x, double k) {
  const double c = std::abs(k);
  const T n2 = dot(x, x);
  if (value_of(n2) == 0.0) return lift(n2, 0.0);
  using std::sqrt;
  return (2.0 / std::sqrt(c)) * clamped_atanh(std::sqrt(c) * sqrt(n2));
}

template <class T>
struct MatvecOut {
  Vec<T> point;
  bool degenerate = false;
};

/// Hyperbolic linear map W (rows x cols) applied to x in the ball, not re-clipped.
template <class T>
MatvecOut<T> mobius_matvec(const MatView<T>& w, std::span<const T> x, double k) {
  if (w.cols != x.size()) throw Error(ErrorCode::DimMismatch, "mobius_matvec: W cols != dim x");
  const double c = std::abs(k);
  MatvecOut<T> out;
  Vec<T> wx;
  wx.reserve(w.rows);
  for (std::size_t i = 0; i < w.rows; ++i) wx.push_back(dot(w.row(i), x));
  const T x2 = dot(x, x);
  if (value_of(x2) == 0.0) {
    for (std::size_t i = 0; i < w.rows; ++i) out.point.push_back(lift(x2, 0.0));
    return out;
  }
  const T wx2 = dot(std::span<const T>(wx), std::span<const T>(wx));
  if (std::sqrt(value_of(wx2)) < kZeroNorm) {
    for (std::size_t i = 0; i < w.rows; ++i) out.point.push_back(lift(x2, 0.0));
    out.degenerate = true;
    return out;
  }
  using std::sqrt;
  using std::tanh;
  const T nx = sqrt(x2);
  const T nwx = sqrt(wx2);
  const T inner = clamped_atanh(std::sqrt(c) * nx);
  const T s = (1.0 / std::sqrt(c)) * tanh((nwx / nx) * inner) / nwx;
  out.point = scaled(std::span<const T>(wx), s);
  return out;
}

/// 1 / (1 + k ||x||^2).
template <class T>
T conformal_factor(std::span<const T> x, double k) {
  const T den = 1.0 + k * dot(x, x);
  if (value_of(den) <= kSingularDenominator) {
    throw Error(ErrorCode::Singularity, "conformal factor denominator vanishes");
  }
  return 1.0 / den;
}

template <class T>
Vec<T> angular_logits(std::span<const T> x, const MatView<T>& prototypes) {
  if (prototypes.cols != x.size()) throw Error(ErrorCode::DimMismatch, "angular head dim");
  Vec<T> out;
  out.reserve(prototypes.rows);
  for (std::size_t j = 0; j < prototypes.rows; ++j) out.push_back(dot(x, prototypes.row(j)));
  return out;
}

template <class T, class U>
Vec<T> euclidean_logits(std::span<const U> x, const MatView<T>& weight, std::span<const T> bias) {
  if (weight.cols != x.size() || weight.rows != bias.size()) {
    throw Error(ErrorCode::DimMismatch, "euclidean head dims");
  }
  Vec<T> out;
  out.reserve(weight.rows);
  for (std::size_t j = 0; j < weight.rows; ++j) out.push_back(affine(weight.row(j), x, bias[j]));
  return out;
}

/// Hyperbolic multinomial logistic regression logits, one per (offset, normal) row.
template <class T>
Vec<T> hyperbolic_mlr_logits(std::span<const T> x, const MatView<T>& offsets,
                             const MatView<T>& normals, double k) {
  if (offsets.cols != x.size() || normals.cols != x.size() || offsets.rows != normals.rows) {
    throw Error(ErrorCode::DimMismatch, "hyperbolic MLR head dims");
  }
  using std::asinh;
  using std::sqrt;
  const double c = std::abs(k);
  const double sc = std::sqrt(c);
  const T lambda = conformal_factor(x, k);
  Vec<T> out;
  out.reserve(offsets.rows);
  for (std::size_t j = 0; j < offsets.rows; ++j) {
    const Vec<T> neg_p = negated(offsets.row(j));
    const Vec<T> shifted = mobius_add<T>(neg_p, x, k);
    const std::span<const T> s(shifted);
    const std::span<const T> wj = normals.row(j);
    const T wn = sqrt(dot(wj, wj));
    const T den = (1.0 - c * dot(s, s)) * wn;
    if (std::abs(value_of(den)) < kSingularDenominator) {
      throw Error(ErrorCode::Singularity, "hyperbolic MLR denominator vanishes");
    }
    const T arg = (2.0 * sc) * dot(s, wj) / den;
    out.push_back(lambda * wn / sc * asinh(arg));
  }
  return out;
}

}  // namespace kernels
}  // namespace curvednet
