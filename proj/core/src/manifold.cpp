#include "curvednet/manifold.hpp"

#include <string>

namespace curvednet {

namespace {

void require_same_ball(const BallPoint& x, const BallPoint& y) {
  if (x.curvature() != y.curvature()) {
    throw Error(ErrorCode::CurvatureMismatch, "ball points have different curvature");
  }
  if (x.dim() != y.dim()) throw Error(ErrorCode::DimMismatch, "ball points have different dims");
}

}  // namespace

bool satisfies_sphere_invariant(std::span<const double> x, double k, double rel_tol) {
  const double target = 1.0 / k;
  return std::abs(dot(x, x) - target) <= rel_tol * target;
}

bool satisfies_ball_invariant(std::span<const double> x, double k) {
  return std::sqrt(dot(x, x)) <= 1.0 / std::abs(k);
}

SpherePoint SpherePoint::from_coords(EuclideanVec coords, Curvature k) {
  if (!k.is_spherical()) throw Error(ErrorCode::BadCurvature, "sphere needs k > 0");
  if (!satisfies_sphere_invariant(coords, k.value())) {
    throw Error(ErrorCode::InvariantViolation, "coordinates are not on the sphere");
  }
  return SpherePoint(std::move(coords), k);
}

BallPoint BallPoint::from_coords(EuclideanVec coords, Curvature k, double xi) {
  if (!k.is_hyperbolic()) throw Error(ErrorCode::BadCurvature, "ball needs k < 0");
  if (!satisfies_ball_invariant(coords, k.value())) {
    throw Error(ErrorCode::OutsideBall, "coordinates lie outside the ball of radius 1/|k|");
  }
  return BallPoint(std::move(coords), k, xi);
}

BallPoint BallPoint::origin(std::size_t dim, Curvature k, double xi) {
  return from_coords(EuclideanVec(dim, 0.0), k, xi);
}

ProductPoint::ProductPoint(std::vector<ManifoldPoint> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw Error(ErrorCode::EmptyComponents, "product point needs a component");
}

SpherePoint sphere_project(std::span<const double> x, Curvature k) {
  if (!k.is_spherical()) throw Error(ErrorCode::BadCurvature, "sphere_project needs k > 0");
  return SpherePoint(kernels::sphere_project<double>(x, k.value()), k);
}

BallPoint ball_clip(std::span<const double> x, Curvature k, double xi) {
  if (!k.is_hyperbolic()) throw Error(ErrorCode::BadCurvature, "ball_clip needs k < 0");
  if (!(xi > 0.0 && xi < 1.0)) throw Error(ErrorCode::BadSpec, "xi must lie in (0, 1)");
  return BallPoint(kernels::ball_clip<double>(x, k.value(), xi), k, xi);
}

BallPoint mobius_add(const BallPoint& x, const BallPoint& y) {
  require_same_ball(x, y);
  const auto sum = kernels::mobius_add<double>(x.coords(), y.coords(), x.curvature().value());
  return ball_clip(sum, x.curvature(), x.xi());
}

double geodesic_dist(const BallPoint& x, const BallPoint& y) {
  require_same_ball(x, y);
  return kernels::geodesic_dist<double>(x.coords(), y.coords(), x.curvature().value());
}

MatvecResult mobius_matvec(const Matrix& w, const BallPoint& x) {
  auto out = kernels::mobius_matvec<double>(w.view(), x.coords(), x.curvature().value());
  return {ball_clip(out.point, x.curvature(), x.xi()), out.degenerate};
}

double conformal_factor(const BallPoint& x) {
  return kernels::conformal_factor<double>(x.coords(), x.curvature().value());
}

}  // namespace curvednet
