#include <gtest/gtest.h>

#include <cmath>

#include "curvednet/heads.hpp"
#include "expect_error.hpp"
#include "sampling.hpp"

using namespace curvednet;
using curvednet::testing::error_code_of;

namespace {

const Curvature kS = Curvature::spherical(1.0);
const Curvature kH = Curvature::hyperbolic(-1.0);

BallPoint ball(std::vector<double> v, double k = -1.0) {
  return BallPoint::from_coords(std::move(v), Curvature::hyperbolic(k));
}

}  // namespace

TEST(AngularLogits, Examples) {
  AngularHead head(Matrix(2, 2, std::vector<double>{0.6, 0.8, 0.8, -0.6}), kS);
  const auto x = SpherePoint::from_coords({0.6, 0.8}, kS);
  const auto l = angular_logits(x, head);
  EXPECT_NEAR(l[0], 1.0, 1e-15);
  EXPECT_NEAR(l[1], 0.0, 1e-15);

  AngularHead other(Matrix(1, 2, std::vector<double>{0.8, 0.6}), kS);
  EXPECT_NEAR(angular_logits(x, other)[0], 0.96, 1e-15);
}

TEST(AngularHead, RejectsOffSpherePrototypes) {
  EXPECT_EQ(error_code_of([] { AngularHead h(Matrix(1, 2, std::vector<double>{1.0, 1.0}), kS); }),
            ErrorCode::InvariantViolation);
}

TEST(AngularLoss, Examples) {
  Matrix one(1, 2, std::vector<double>{1.0, -1.0});
  const std::size_t label0[] = {0};
  EXPECT_NEAR(angular_loss(one, label0), 0.1269280, 1e-7);
  EXPECT_NEAR(angular_loss(one, label0), std::log1p(std::exp(-2.0)), 1e-15);

  Matrix flat(1, 5, 0.37);
  const std::size_t label3[] = {3};
  EXPECT_NEAR(angular_loss(flat, label3), std::log(5.0), 1e-15);

  Matrix two(2, 3, std::vector<double>{0.1, 0.5, -0.2, 1.0, 0.0, 0.3});
  const std::size_t labels[] = {1, 2};
  Matrix r0(1, 3, std::vector<double>{0.1, 0.5, -0.2});
  Matrix r1(1, 3, std::vector<double>{1.0, 0.0, 0.3});
  const std::size_t l1[] = {1};
  const std::size_t l2[] = {2};
  EXPECT_NEAR(angular_loss(two, labels), 0.5 * (angular_loss(r0, l1) + angular_loss(r1, l2)), 1e-15);
}

TEST(AngularLoss, BadLabel) {
  Matrix m(1, 2, 0.0);
  const std::size_t bad[] = {2};
  EXPECT_EQ(error_code_of([&] { (void)angular_loss(m, bad); }), ErrorCode::BadLabel);
}

TEST(AngularLoss, EqualsCrossEntropyOfSoftmax) {
  Rng rng(404);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t b = 1 + rng.below(8);
    const std::size_t c = 2 + rng.below(6);
    Matrix logits(b, c, curvednet::testing::gaussian(b * c, 2.0, rng));
    std::vector<std::size_t> labels(b);
    double mean = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
      labels[i] = rng.below(c);
      mean += cross_entropy(softmax(logits.row(i)), labels[i]);
    }
    mean /= static_cast<double>(b);
    EXPECT_NEAR(angular_loss(logits, labels), mean, 1e-12);
  }
}

TEST(HyperbolicMlr, ClosedFormAtOriginOffset) {
  HyperbolicMLRHead head(Matrix(1, 2, 0.0), Matrix(1, 2, std::vector<double>{1.0, 0.0}), kH);
  const double logit = hyperbolic_mlr_logits(ball({0.5, 0}), head)[0];
  EXPECT_NEAR(logit, 4.0 / 3.0 * std::log(3.0), 1e-12);
}

TEST(HyperbolicMlr, ZeroCases) {
  HyperbolicMLRHead at_x(Matrix(1, 2, std::vector<double>{0.3, 0.2}),
                         Matrix(1, 2, std::vector<double>{0.7, -0.4}), kH);
  EXPECT_NEAR(hyperbolic_mlr_logits(ball({0.3, 0.2}), at_x)[0], 0.0, 1e-15);

  HyperbolicMLRHead perp(Matrix(1, 2, 0.0), Matrix(1, 2, std::vector<double>{0.0, 1.0}), kH);
  EXPECT_EQ(hyperbolic_mlr_logits(ball({0.4, 0.0}), perp)[0], 0.0);
}

TEST(HyperbolicMlr, OddAlongTheNormalAxis) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + rng.below(5);
    const std::size_t axis = rng.below(d);
    std::vector<double> w(d, 0.0);
    w[axis] = rng.uniform(0.2, 3.0);
    HyperbolicMLRHead head(Matrix(1, d, 0.0), Matrix(1, d, w), kH);
    std::vector<double> x(d, 0.0);
    x[axis] = rng.uniform(-0.9, 0.9);
    std::vector<double> neg(x);
    neg[axis] = -neg[axis];
    EXPECT_NEAR(hyperbolic_mlr_logits(ball(neg), head)[0], -hyperbolic_mlr_logits(ball(x), head)[0], 1e-9);
  }
}

TEST(HyperbolicMlr, SmallCurvatureHasFiniteLimit) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 2 + rng.below(4);
    const auto p = curvednet::testing::uniform_in_ball(d, 1.0, rng);
    const auto w = curvednet::testing::gaussian(d, 1.0, rng);
    const auto x = curvednet::testing::uniform_in_ball(d, 1.0, rng);
    double k = -1e-6;
    const auto logit_at = [&](double kk) {
      HyperbolicMLRHead head(Matrix(1, d, p), Matrix(1, d, w), Curvature::hyperbolic(kk));
      return hyperbolic_mlr_logits(ball(x, kk), head)[0];
    };
    EXPECT_LT(std::abs(logit_at(k) - logit_at(k / 2.0)), 1e-3);
  }
}

TEST(HyperbolicMlr, RejectsBadParameters) {
  EXPECT_EQ(error_code_of([] {
              HyperbolicMLRHead h(Matrix(1, 2, std::vector<double>{2.0, 0.0}), Matrix(1, 2, 1.0), kH);
            }),
            ErrorCode::OutsideBall);
  EXPECT_EQ(error_code_of([] { HyperbolicMLRHead h(Matrix(1, 2, 0.0), Matrix(1, 2, 0.0), kH); }),
            ErrorCode::InvariantViolation);
}

TEST(EuclideanLogits, Examples) {
  EuclideanHead id{Matrix::identity(2), {0.0, 0.0}};
  const std::vector<double> x = {1.0, 2.0};
  EXPECT_EQ(euclidean_logits(x, id), (std::vector<double>{1.0, 2.0}));
  EuclideanHead bias{Matrix(2, 2, 0.0), {3.0, 4.0}};
  EXPECT_EQ(euclidean_logits(x, bias), (std::vector<double>{3.0, 4.0}));
  EuclideanHead row{Matrix(1, 2, 1.0), {0.0}};
  EXPECT_EQ(euclidean_logits(std::vector<double>{2.0, 3.0}, row), (std::vector<double>{5.0}));
}

TEST(Softmax, Examples) {
  const auto a = softmax(std::vector<double>{0.0, 0.0});
  EXPECT_EQ(a[0], 0.5);
  EXPECT_EQ(a[1], 0.5);
  const auto b = softmax(std::vector<double>{std::log(2.0), 0.0});
  EXPECT_NEAR(b[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(b[1], 1.0 / 3.0, 1e-15);
  const auto c = softmax(std::vector<double>{1000.0, 0.0});
  EXPECT_EQ(c[0], 1.0);
  EXPECT_GE(c[1], 0.0);
  EXPECT_LT(c[1], 1e-300);
}

TEST(CrossEntropy, Examples) {
  EXPECT_EQ(cross_entropy(ConfidenceVec({1.0, 0.0}), 0), 0.0);
  EXPECT_NEAR(cross_entropy(ConfidenceVec({0.25, 0.25, 0.25, 0.25}), 2), std::log(4.0), 1e-15);
  EXPECT_NEAR(cross_entropy(ConfidenceVec({0.25, 0.75}), 1), 0.2876821, 1e-7);
  EXPECT_TRUE(std::isfinite(cross_entropy(ConfidenceVec({1.0, 0.0}), 1)));
}

TEST(ConfidenceVec, ValidatesSimplex) {
  EXPECT_EQ(error_code_of([] { ConfidenceVec c({0.5, 0.6}); }), ErrorCode::InvariantViolation);
  EXPECT_EQ(error_code_of([] { ConfidenceVec c({-0.1, 1.1}); }), ErrorCode::InvariantViolation);
  ConfidenceVec ok({0.2, 0.7, 0.1});
  EXPECT_EQ(ok.argmax(), 1u);
  EXPECT_EQ(ok.max(), 0.7);
}

TEST(Initialisers, FollowTheRules) {
  Rng rng(3);
  const auto e = init_euclidean_head(4, 9, rng);
  for (double v : e.weight.data()) EXPECT_LE(std::abs(v), 1.0 / 3.0);
  for (double b : e.bias) EXPECT_EQ(b, 0.0);
  const auto a = init_angular_head(4, 9, Curvature::spherical(2.0), rng);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_TRUE(satisfies_sphere_invariant(a.prototypes().row(j), 2.0));
  const auto m = init_mlr_head(4, 9, kH, rng);
  for (double v : m.offsets().data()) EXPECT_EQ(v, 0.0);
  for (double v : m.normals().data()) EXPECT_LE(std::abs(v), 1.0 / 3.0);
}
