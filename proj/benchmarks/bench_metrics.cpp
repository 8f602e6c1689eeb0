#include <benchmark/benchmark.h>

#include "curvednet/metrics.hpp"
#include "curvednet/oracles.hpp"
#include "curvednet/rng.hpp"

using namespace curvednet;

namespace {

ScoreSet make_set(std::size_t n) {
  Rng rng(1);
  ScoreSet s;
  for (std::size_t i = 0; i < n; ++i) {
    const bool ood = i % 4 == 0;
    s.add(std::to_string(i), ood, rng.normal(ood ? 1.0 : 0.0, 1.0));
  }
  return s;
}

void BM_Auroc(benchmark::State& state) {
  const auto s = make_set(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(auroc(s));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Auroc)->RangeMultiplier(4)->Range(256, 65536)->Complexity();

void BM_Evaluate(benchmark::State& state) {
  const auto s = make_set(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(s));
}
BENCHMARK(BM_Evaluate)->Arg(2400)->Arg(65536);

// The pairwise reference, for scale.
void BM_AurocBruteforce(benchmark::State& state) {
  const auto s = make_set(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(oracles::auroc_bruteforce(s));
}
BENCHMARK(BM_AurocBruteforce)->Arg(256)->Arg(2048);

}  // namespace

BENCHMARK_MAIN();
