#include <benchmark/benchmark.h>

#include "curvednet/heads.hpp"
#include "curvednet/manifold.hpp"
#include "curvednet/rng.hpp"

using namespace curvednet;

namespace {

const Curvature kH = Curvature::hyperbolic(-1.0);

BallPoint random_point(std::size_t dim, Rng& rng) {
  std::vector<double> x(dim);
  for (double& v : x) v = rng.uniform(-0.8, 0.8) / std::sqrt(static_cast<double>(dim));
  return BallPoint::from_coords(std::move(x), kH);
}

void BM_MobiusAdd(benchmark::State& state) {
  Rng rng(2);
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto x = random_point(dim, rng);
  const auto y = random_point(dim, rng);
  for (auto _ : state) benchmark::DoNotOptimize(mobius_add(x, y));
}
BENCHMARK(BM_MobiusAdd)->Arg(8)->Arg(64)->Arg(512);

void BM_GeodesicDist(benchmark::State& state) {
  Rng rng(3);
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto x = random_point(dim, rng);
  const auto y = random_point(dim, rng);
  for (auto _ : state) benchmark::DoNotOptimize(geodesic_dist(x, y));
}
BENCHMARK(BM_GeodesicDist)->Arg(8)->Arg(64)->Arg(512);

void BM_MobiusMatvec(benchmark::State& state) {
  Rng rng(4);
  const auto dim = static_cast<std::size_t>(state.range(0));
  Matrix w(dim, dim);
  for (double& v : w.data()) v = rng.normal(0.0, 1.0 / std::sqrt(static_cast<double>(dim)));
  const auto x = random_point(dim, rng);
  for (auto _ : state) benchmark::DoNotOptimize(mobius_matvec(w, x));
}
BENCHMARK(BM_MobiusMatvec)->Arg(8)->Arg(64);

void BM_HyperbolicMlrLogits(benchmark::State& state) {
  Rng rng(5);
  const std::size_t dim = 8;
  const auto classes = static_cast<std::size_t>(state.range(0));
  const auto head = init_mlr_head(classes, dim, kH, rng);
  const auto x = random_point(dim, rng);
  for (auto _ : state) benchmark::DoNotOptimize(hyperbolic_mlr_logits(x, head));
}
BENCHMARK(BM_HyperbolicMlrLogits)->Arg(10)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
