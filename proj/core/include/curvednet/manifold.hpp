#pragma once

#include <cmath>
#include <span>
#include <variant>
#include <vector>

#include "curvednet/error.hpp"
#include "curvednet/kernels.hpp"
#include "curvednet/matrix.hpp"

namespace curvednet {

/// Signed curvature: positive for spheres, negative for Poincare balls.
class Curvature {
 public:
  explicit Curvature(double value) : value_(value) {
    if (!std::isfinite(value)) throw Error(ErrorCode::BadCurvature, "curvature must be finite");
  }

  static Curvature spherical(double value) {
    if (!(value > 0.0)) throw Error(ErrorCode::BadCurvature, "spherical curvature must be > 0");
    return Curvature(value);
  }
  static Curvature hyperbolic(double value) {
    if (!(value < 0.0)) throw Error(ErrorCode::BadCurvature, "hyperbolic curvature must be < 0");
    return Curvature(value);
  }

  double value() const noexcept { return value_; }
  double magnitude() const noexcept { return std::abs(value_); }
  bool is_spherical() const noexcept { return value_ > 0.0; }
  bool is_hyperbolic() const noexcept { return value_ < 0.0; }

  friend bool operator==(const Curvature&, const Curvature&) = default;

 private:
  double value_;
};

using EuclideanVec = std::vector<double>;

/// Point with ||x||^2 = 1/k.
class SpherePoint {
 public:
  /// Validates the sphere invariant (relative tolerance 1e-9).
  static SpherePoint from_coords(EuclideanVec coords, Curvature k);

  std::span<const double> coords() const noexcept { return coords_; }
  Curvature curvature() const noexcept { return curvature_; }
  std::size_t dim() const noexcept { return coords_.size(); }

 private:
  SpherePoint(EuclideanVec coords, Curvature k) : coords_(std::move(coords)), curvature_(k) {}
  friend SpherePoint sphere_project(std::span<const double>, Curvature);

  EuclideanVec coords_;
  Curvature curvature_;
};

/// Point of the Poincare ball with radius 1/|k|, carrying the clip margin xi
/// used when results are re-clipped.
class BallPoint {
 public:
  /// Validates ||x|| <= 1/|k|.
  static BallPoint from_coords(EuclideanVec coords, Curvature k, double xi = kDefaultXi);
  static BallPoint origin(std::size_t dim, Curvature k, double xi = kDefaultXi);

  std::span<const double> coords() const noexcept { return coords_; }
  Curvature curvature() const noexcept { return curvature_; }
  double xi() const noexcept { return xi_; }
  std::size_t dim() const noexcept { return coords_.size(); }

 private:
  BallPoint(EuclideanVec coords, Curvature k, double xi)
      : coords_(std::move(coords)), curvature_(k), xi_(xi) {}
  friend BallPoint ball_clip(std::span<const double>, Curvature, double);

  EuclideanVec coords_;
  Curvature curvature_;
  double xi_;
};

using ManifoldPoint = std::variant<EuclideanVec, SpherePoint, BallPoint>;

/// Point of a product manifold M_1 x ... x M_N.
class ProductPoint {
 public:
  explicit ProductPoint(std::vector<ManifoldPoint> components);

  std::span<const ManifoldPoint> components() const noexcept { return components_; }

 private:
  std::vector<ManifoldPoint> components_;
};

SpherePoint sphere_project(std::span<const double> x, Curvature k);
BallPoint ball_clip(std::span<const double> x, Curvature k, double xi = kDefaultXi);
BallPoint mobius_add(const BallPoint& x, const BallPoint& y);
double geodesic_dist(const BallPoint& x, const BallPoint& y);

struct MatvecResult {
  BallPoint point;
  /// Set when ||Wx|| vanished for a nonzero x; point is then the origin.
  bool degenerate = false;
};

MatvecResult mobius_matvec(const Matrix& w, const BallPoint& x);
double conformal_factor(const BallPoint& x);

bool satisfies_sphere_invariant(std::span<const double> x, double k, double rel_tol = 1e-9);
bool satisfies_ball_invariant(std::span<const double> x, double k);

}  // namespace curvednet
