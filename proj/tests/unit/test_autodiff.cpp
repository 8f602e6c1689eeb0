#include <gtest/gtest.h>

#include <cmath>

#include "curvednet/autodiff.hpp"
#include "curvednet/manifold.hpp"
#include "curvednet/rng.hpp"

using namespace curvednet;

TEST(Sgd, Examples) {
  ParamSet p;
  p.add("a", {1}, {1.0});
  p[0].grad = {2.0};
  sgd_step(p, 0.1);
  EXPECT_DOUBLE_EQ(p[0].value[0], 0.8);
  EXPECT_EQ(p[0].grad[0], 0.0);

  p[0].grad = {0.0};
  sgd_step(p, 0.1);
  EXPECT_DOUBLE_EQ(p[0].value[0], 0.8);

  p[0].grad = {5.0};
  sgd_step(p, 0.0);
  EXPECT_DOUBLE_EQ(p[0].value[0], 0.8);
}

TEST(Sgd, RejectsNonFiniteGradientsUntouched) {
  ParamSet p;
  p.add("a", {2}, {1.0, 2.0});
  p[0].grad = {0.5, std::nan("")};
  try {
    sgd_step(p, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteGradient);
  }
  EXPECT_EQ(p[0].value[0], 1.0);
}

TEST(Sgd, ReprojectsConstrainedRows) {
  Rng rng(11);
  ParamSet p;
  std::vector<double> protos(12);
  for (double& v : protos) v = rng.normal();
  p.add("protos", {3, 4}, protos, Constraint::sphere_rows, 2.0);
  p.project();
  std::vector<double> offsets = {0.1, 0.2, 0.0, 0.0, 0.3, 0.1, 0.0, 0.0};
  p.add("offsets", {2, 4}, offsets, Constraint::ball_rows, -1.0);
  for (int step = 0; step < 20; ++step) {
    for (auto& par : p) {
      for (double& g : par.grad) g = rng.normal(0.0, 5.0);
    }
    sgd_step(p, 0.3);
    for (std::size_t r = 0; r < 3; ++r) {
      EXPECT_TRUE(satisfies_sphere_invariant(std::span<const double>(p[0].value).subspan(4 * r, 4), 2.0));
    }
    for (std::size_t r = 0; r < 2; ++r) {
      EXPECT_TRUE(satisfies_ball_invariant(std::span<const double>(p[1].value).subspan(4 * r, 4), -1.0));
    }
  }
}

TEST(ParamSet, ShapesAndLookup) {
  ParamSet p;
  EXPECT_EQ(p.add("w", {2, 3}, std::vector<double>(6, 1.0)), 0u);
  p.add("b", {2}, {0.0, 0.0});
  EXPECT_EQ(p.total_coordinates(), 8u);
  EXPECT_EQ(p.index_of("b"), 1u);
  EXPECT_EQ(p.at("w").grad.size(), p.at("w").value.size());
  EXPECT_THROW(p.add("b", {1}, {0.0}), Error);
  EXPECT_THROW(p.add("bad", {2, 2}, {0.0}), Error);
  EXPECT_THROW((void)p.index_of("missing"), Error);
}

TEST(GradCheck, QuadraticIsExact) {
  ParamSet p;
  Rng rng(1);
  std::vector<double> v(80);
  for (double& x : v) x = rng.normal();
  p.add("p", {80}, v);
  const auto loss = [](ad::Tape&, const Bindings& b) { return 0.5 * ad::dot(b[0], b[0]); };
  const GradCheckResult r = grad_check(loss, p, 0);
  EXPECT_LE(r.max_rel_error, 1e-7);
  EXPECT_EQ(r.coordinates_checked, 50u);
}

TEST(GradCheck, DetectsAWrongGradient) {
  ParamSet p;
  p.add("p", {3}, {0.3, -0.7, 1.1});
  // Records tanh's value but claims a derivative of 2.
  const auto loss = [](ad::Tape& t, const Bindings& b) {
    const ad::Var& x = b[0][1];
    return t.unary(ad::Op::tanh, x, std::tanh(x.value()), 2.0);
  };
  EXPECT_GT(grad_check(loss, p, 0).max_rel_error, 0.1);
}

TEST(GradCheck, ChecksEveryCoordinateOfSmallSets) {
  ParamSet p;
  p.add("p", {7}, {1, 2, 3, 4, 5, 6, 7});
  const auto loss = [](ad::Tape&, const Bindings& b) { return ad::sum(b[0]); };
  EXPECT_EQ(grad_check(loss, p, 0).coordinates_checked, 7u);
}
