#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "curvednet/error.hpp"
#include "curvednet/kernels.hpp"
#include "curvednet/rng.hpp"
#include "curvednet/tape.hpp"

using namespace curvednet;
using ad::Tape;
using ad::Var;

TEST(Tape, ProductRule) {
  Tape t;
  const Var a = t.leaf(2.0);
  const Var b = t.leaf(3.0);
  const auto g = t.backward(a * b);
  EXPECT_EQ(g[a.index()], 3.0);
  EXPECT_EQ(g[b.index()], 2.0);
}

TEST(Tape, TanhAtZero) {
  Tape t;
  const Var x = t.leaf(0.0);
  EXPECT_EQ(t.backward(ad::tanh(x))[x.index()], 1.0);
}

TEST(Tape, AtanhAtHalf) {
  Tape t;
  const Var x = t.leaf(0.5);
  EXPECT_NEAR(t.backward(ad::atanh(x))[x.index()], 1.3333333, 1e-7);
}

TEST(Tape, ElementaryDerivatives) {
  struct Case {
    Var (*f)(const Var&);
    double (*df)(double);
    double x;
  };
  const Case cases[] = {
      {ad::asinh, [](double x) { return 1.0 / std::sqrt(1.0 + x * x); }, 0.7},
      {ad::exp, [](double x) { return std::exp(x); }, -0.3},
      {ad::log, [](double x) { return 1.0 / x; }, 2.5},
      {ad::sqrt, [](double x) { return 0.5 / std::sqrt(x); }, 4.0},
      {ad::tanh, [](double x) { return 1.0 - std::tanh(x) * std::tanh(x); }, 0.4},
  };
  for (const auto& c : cases) {
    Tape t;
    const Var x = t.leaf(c.x);
    EXPECT_DOUBLE_EQ(t.backward(c.f(x))[x.index()], c.df(c.x));
  }
}

TEST(Tape, QuotientAndScalarMixing) {
  Tape t;
  const Var a = t.leaf(3.0);
  const Var b = t.leaf(2.0);
  const auto g = t.backward(a / b + 2.0 * a - 1.0 / b);
  EXPECT_DOUBLE_EQ(g[a.index()], 0.5 + 2.0);
  EXPECT_DOUBLE_EQ(g[b.index()], -3.0 / 4.0 + 1.0 / 4.0);
}

TEST(Tape, FanOutAccumulates) {
  Tape t;
  const Var x = t.leaf(1.5);
  const Var y = x * x * x;
  EXPECT_DOUBLE_EQ(t.backward(y)[x.index()], 3.0 * 1.5 * 1.5);
}

TEST(Tape, DotAndNorm) {
  Tape t;
  std::vector<Var> x = {t.leaf(3.0), t.leaf(4.0)};
  const Var n = kernels::norm<Var>(x);
  EXPECT_DOUBLE_EQ(n.value(), 5.0);
  const auto g = t.backward(n);
  EXPECT_DOUBLE_EQ(g[x[0].index()], 0.6);
  EXPECT_DOUBLE_EQ(g[x[1].index()], 0.8);
}

TEST(Tape, SelectMaxRoutesToArgmax) {
  Tape t;
  std::vector<Var> x = {t.leaf(0.2), t.leaf(0.9), t.leaf(0.9), t.leaf(-1.0)};
  const auto g = t.backward(ad::select_max(x));
  EXPECT_EQ(g[x[0].index()], 0.0);
  EXPECT_EQ(g[x[1].index()], 1.0);
  EXPECT_EQ(g[x[2].index()], 0.0);
}

TEST(Tape, SoftmaxJacobian) {
  Tape t;
  std::vector<Var> x = {t.leaf(std::log(2.0)), t.leaf(0.0)};
  const auto s = ad::softmax(x);
  EXPECT_NEAR(s[0].value(), 2.0 / 3.0, 1e-15);
  const auto g = t.backward(s[0]);
  EXPECT_NEAR(g[x[0].index()], (2.0 / 3.0) * (1.0 / 3.0), 1e-15);
  EXPECT_NEAR(g[x[1].index()], -(2.0 / 3.0) * (1.0 / 3.0), 1e-15);
}

TEST(Tape, FusedCrossEntropyMatchesComposition) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Tape t;
    std::vector<Var> z;
    for (int i = 0; i < 5; ++i) z.push_back(t.leaf(rng.normal(0.0, 3.0)));
    const std::size_t label = rng.below(5);
    const Var fused = ad::softmax_cross_entropy(z, label);
    const auto g_fused = t.backward(fused);
    const auto s = ad::softmax(z);
    const Var composed = -ad::log(s[label]);
    const auto g_comp = t.backward(composed);
    EXPECT_NEAR(fused.value(), composed.value(), 1e-12);
    for (const Var& v : z) EXPECT_NEAR(g_fused[v.index()], g_comp[v.index()], 1e-12);
  }
}

TEST(Tape, CrossEntropyRejectsBadLabel) {
  Tape t;
  std::vector<Var> z = {t.leaf(1.0), t.leaf(2.0)};
  try {
    (void)ad::softmax_cross_entropy(z, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadLabel);
  }
}

TEST(Tape, BackwardNeedsOneScalar) {
  Tape t;
  std::vector<Var> out = {t.leaf(1.0), t.leaf(2.0)};
  try {
    (void)t.backward(std::span<const Var>(out));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonScalarOutput);
  }
  EXPECT_NO_THROW((void)t.backward(std::span<const Var>(out).first(1)));
}

TEST(Tape, TopologicalOrder) {
  Tape t;
  const Var a = t.leaf(1.0);
  const Var b = t.leaf(2.0);
  (void)ad::tanh(a * b + a);
  for (std::uint32_t node = 0; node < t.size(); ++node) {
    for (std::uint32_t in : t.inputs(node)) EXPECT_LT(in, node);
  }
}

TEST(Tape, BackwardIsBitDeterministic) {
  Tape t;
  Rng rng(3);
  std::vector<Var> x;
  for (int i = 0; i < 16; ++i) x.push_back(t.leaf(rng.normal()));
  const Var y = ad::tanh(ad::dot(x, x)) * ad::sum(x);
  const auto g1 = t.backward(y);
  const auto g2 = t.backward(y);
  ASSERT_EQ(g1.size(), g2.size());
  for (std::size_t i = 0; i < g1.size(); ++i) EXPECT_EQ(g1[i], g2[i]);
}

TEST(Tape, BoundaryDistanceTracksKinks) {
  Tape t;
  EXPECT_TRUE(std::isinf(t.min_boundary_distance()));
  (void)relu(t.leaf(0.25));
  EXPECT_DOUBLE_EQ(t.min_boundary_distance(), 0.25);
  (void)relu(t.leaf(-0.01));
  EXPECT_DOUBLE_EQ(t.min_boundary_distance(), 0.01);
  t.clear();
  EXPECT_EQ(t.size(), 0u);
  EXPECT_TRUE(std::isinf(t.min_boundary_distance()));
}
