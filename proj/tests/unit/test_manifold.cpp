#include <gtest/gtest.h>

#include <cmath>

#include "curvednet/manifold.hpp"
#include "curvednet/oracles.hpp"
#include "expect_error.hpp"
#include "sampling.hpp"

using namespace curvednet;
using curvednet::testing::error_code_of;
using curvednet::testing::moebius_radius;
using curvednet::testing::uniform_in_ball;

namespace {

const Curvature kH = Curvature::hyperbolic(-1.0);

BallPoint ball(std::vector<double> v, double k = -1.0) {
  return BallPoint::from_coords(std::move(v), Curvature::hyperbolic(k));
}

}  // namespace

TEST(SphereProject, Examples) {
  const auto a = sphere_project(std::vector<double>{3, 4}, Curvature::spherical(1.0));
  EXPECT_NEAR(a.coords()[0], 0.6, 1e-15);
  EXPECT_NEAR(a.coords()[1], 0.8, 1e-15);
  const auto b = sphere_project(std::vector<double>{3, 4}, Curvature::spherical(4.0));
  EXPECT_NEAR(b.coords()[0], 0.3, 1e-15);
  EXPECT_NEAR(b.coords()[1], 0.4, 1e-15);
  EXPECT_EQ(error_code_of([] { (void)sphere_project(std::vector<double>{0, 0}, Curvature::spherical(1.0)); }),
            ErrorCode::ZeroVector);
  EXPECT_EQ(error_code_of([] { (void)sphere_project(std::vector<double>{1, 0}, Curvature(-1.0)); }),
            ErrorCode::BadCurvature);
}

TEST(SphereProject, IdempotentOnSpherePoints) {
  Rng rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    const double k = rng.uniform(0.1, 5.0);
    const auto s = sphere_project(curvednet::testing::gaussian(1 + rng.below(6), 2.0, rng),
                                  Curvature::spherical(k));
    const auto again = sphere_project(s.coords(), Curvature::spherical(k));
    for (std::size_t i = 0; i < s.dim(); ++i) EXPECT_NEAR(again.coords()[i], s.coords()[i], 1e-12);
  }
}

TEST(BallClip, Examples) {
  const auto a = ball_clip(std::vector<double>{0.5, 0}, kH, 1e-5);
  EXPECT_EQ(a.coords()[0], 0.5);
  EXPECT_EQ(a.coords()[1], 0.0);
  const auto b = ball_clip(std::vector<double>{3, 0}, kH, 1e-5);
  EXPECT_NEAR(b.coords()[0], 0.99999, 1e-15);
  EXPECT_EQ(b.coords()[1], 0.0);
  const auto c = ball_clip(std::vector<double>{3, 0}, Curvature::hyperbolic(-0.01), 1e-5);
  EXPECT_EQ(c.coords()[0], 3.0);
  EXPECT_EQ(error_code_of([] { (void)ball_clip(std::vector<double>{1, 0}, Curvature(1.0), 1e-5); }),
            ErrorCode::BadCurvature);
}

TEST(BallClip, OutputsSatisfyInvariant) {
  Rng rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const double k = -rng.uniform(0.01, 3.0);
    const auto x = curvednet::testing::gaussian(1 + rng.below(6), 3.0, rng);
    const auto b = ball_clip(x, Curvature::hyperbolic(k));
    EXPECT_TRUE(satisfies_ball_invariant(b.coords(), k));
  }
}

TEST(BallPoint, RejectsOutsidePoints) {
  EXPECT_EQ(error_code_of([] { (void)ball(std::vector<double>{1.5, 0.0}); }), ErrorCode::OutsideBall);
  EXPECT_NO_THROW((void)ball(std::vector<double>{1.0, 0.0}));
}

TEST(MobiusAdd, Examples) {
  const auto a = mobius_add(ball({0, 0}), ball({0.4, 0.1}));
  EXPECT_NEAR(a.coords()[0], 0.4, 1e-15);
  EXPECT_NEAR(a.coords()[1], 0.1, 1e-15);
  const auto b = mobius_add(ball({0.3, 0}), ball({0.4, 0}));
  EXPECT_NEAR(b.coords()[0], 0.625, 1e-12);
  EXPECT_NEAR(b.coords()[1], 0.0, 1e-15);
  const auto c = mobius_add(ball({-0.3, 0.2}), ball({0.3, -0.2}));
  EXPECT_NEAR(c.coords()[0], 0.0, 1e-15);
  EXPECT_NEAR(c.coords()[1], 0.0, 1e-15);
}

TEST(MobiusAdd, CurvatureMismatch) {
  EXPECT_EQ(error_code_of([] { (void)mobius_add(ball({0.1, 0}), ball({0.1, 0}, -0.5)); }),
            ErrorCode::CurvatureMismatch);
}

class MoebiusProperties : public ::testing::TestWithParam<double> {};

TEST_P(MoebiusProperties, LeftIdentityAndInverse) {
  const double k = GetParam();
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 1 + rng.below(6);
    const auto x = uniform_in_ball(d, moebius_radius(k), rng);
    const auto y = ball(uniform_in_ball(d, moebius_radius(k), rng), k);
    const auto id = mobius_add(BallPoint::origin(d, Curvature::hyperbolic(k)), y);
    std::vector<double> neg(x);
    for (double& v : neg) v = -v;
    const auto inv = mobius_add(ball(neg, k), ball(x, k));
    for (std::size_t i = 0; i < d; ++i) {
      EXPECT_NEAR(id.coords()[i], y.coords()[i], 1e-12);
      EXPECT_NEAR(inv.coords()[i], 0.0, 1e-12);
    }
  }
}

TEST_P(MoebiusProperties, CollinearMatchesTanhAddition) {
  const double k = GetParam();
  Rng rng(77);
  const double r = moebius_radius(k);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 1 + rng.below(5);
    const std::size_t axis = rng.below(d);
    const double a = rng.uniform(-r, r);
    const double b = rng.uniform(-r, r);
    std::vector<double> x(d, 0.0), y(d, 0.0);
    x[axis] = a;
    y[axis] = b;
    const auto s = mobius_add(ball(x, k), ball(y, k));
    EXPECT_NEAR(s.coords()[axis], oracles::mobius_1d_reference(a, b, k), 1e-12);
  }
}

TEST_P(MoebiusProperties, GeodesicMetricAxioms) {
  const double k = GetParam();
  Rng rng(9001);
  const double r = moebius_radius(k);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 1 + rng.below(6);
    const auto x = ball(uniform_in_ball(d, r, rng), k);
    const auto y = ball(uniform_in_ball(d, r, rng), k);
    const auto z = ball(uniform_in_ball(d, r, rng), k);
    const double dxy = geodesic_dist(x, y);
    EXPECT_NEAR(dxy, geodesic_dist(y, x), 1e-9);
    EXPECT_LE(geodesic_dist(x, x), 1e-9);
    EXPECT_GE(dxy, 0.0);
    EXPECT_LE(geodesic_dist(x, z), dxy + geodesic_dist(y, z) + 1e-9);
  }
}

TEST_P(MoebiusProperties, IdentityMatvecFixesPoints) {
  const double k = GetParam();
  Rng rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 1 + rng.below(6);
    const auto x = ball(uniform_in_ball(d, moebius_radius(k), rng), k);
    const auto r = mobius_matvec(Matrix::identity(d), x);
    EXPECT_FALSE(r.degenerate);
    for (std::size_t i = 0; i < d; ++i) EXPECT_NEAR(r.point.coords()[i], x.coords()[i], 1e-9);
  }
}

INSTANTIATE_TEST_SUITE_P(Curvatures, MoebiusProperties, ::testing::Values(-1.0, -0.01));

TEST(GeodesicDist, Examples) {
  EXPECT_EQ(geodesic_dist(ball({0.2, 0.7}), ball({0.2, 0.7})), 0.0);
  EXPECT_NEAR(geodesic_dist(ball({0, 0}), ball({0.5, 0})), std::log(3.0), 1e-9);
  EXPECT_NEAR(geodesic_dist(ball({0, 0}), ball({0.5, 0})), 1.0986123, 1e-7);
  EXPECT_NEAR(geodesic_dist(ball({0.5, 0}), ball({-0.5, 0})), 2.1972246, 1e-7);
}

TEST(GeodesicDist, ClampsNearTheBoundary) {
  const double d = geodesic_dist(ball({1.0, 0}), ball({-1.0, 0}));
  EXPECT_TRUE(std::isfinite(d));
  EXPECT_NEAR(d, 2.0 * std::atanh(kAtanhLimit), 1e-9);
}

TEST(MobiusMatvec, Examples) {
  Matrix w(1, 1, 2.0);
  const auto a = mobius_matvec(w, ball({0.3}));
  EXPECT_NEAR(a.point.coords()[0], 0.6 / 1.09, 1e-15);
  EXPECT_NEAR(a.point.coords()[0], std::tanh(2.0 * std::atanh(0.3)), 1e-15);

  const auto b = mobius_matvec(Matrix::identity(2), ball({0.2, -0.1}));
  EXPECT_NEAR(b.point.coords()[0], 0.2, 1e-15);
  EXPECT_NEAR(b.point.coords()[1], -0.1, 1e-15);

  Matrix rect(3, 2, std::vector<double>{1, 0, 0, 1, 0, 0});
  const auto c = mobius_matvec(rect, ball({0, 0}));
  ASSERT_EQ(c.point.dim(), 3u);
  for (double v : c.point.coords()) EXPECT_EQ(v, 0.0);
  EXPECT_FALSE(c.degenerate);
}

TEST(MobiusMatvec, RankDeficientMapFlagsDegenerate) {
  Matrix zero(2, 2, 0.0);
  const auto r = mobius_matvec(zero, ball({0.3, 0.1}));
  EXPECT_TRUE(r.degenerate);
  for (double v : r.point.coords()) EXPECT_EQ(v, 0.0);
}

TEST(MobiusMatvec, DimMismatch) {
  EXPECT_EQ(error_code_of([] { (void)mobius_matvec(Matrix(2, 3, 1.0), ball({0.1, 0.1})); }),
            ErrorCode::DimMismatch);
}

TEST(ConformalFactor, Examples) {
  EXPECT_EQ(conformal_factor(ball({0, 0})), 1.0);
  EXPECT_NEAR(conformal_factor(ball({0.5, 0})), 1.3333333, 1e-7);
  EXPECT_EQ(error_code_of([] { (void)conformal_factor(ball({1.0, 0})); }), ErrorCode::Singularity);
  EXPECT_EQ(error_code_of([] { (void)conformal_factor(ball({0.6, 0.8})); }), ErrorCode::Singularity);
}

TEST(ProductPoint, NeedsComponents) {
  EXPECT_EQ(error_code_of([] { ProductPoint p({}); }), ErrorCode::EmptyComponents);
  ProductPoint p({EuclideanVec{1.0}, ball({0.1})});
  EXPECT_EQ(p.components().size(), 2u);
}
