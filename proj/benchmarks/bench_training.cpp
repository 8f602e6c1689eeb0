#include <benchmark/benchmark.h>

#include "curvednet/models.hpp"
#include "curvednet/scoring.hpp"

using namespace curvednet;

namespace {

Model make_model(std::string_view arch) {
  ModelConfig cfg = model_config_for(arch, 1.0, -1.0);
  cfg.input_dim = 16;
  cfg.hidden = {64, 64};
  cfg.classes = 10;
  return Model::create(cfg, 0);
}

const char* kArchs[] = {"baseline", "sio", "hio", "mio", "sit", "hit", "mit"};

void BM_Forward(benchmark::State& state) {
  const Model m = make_model(kArchs[state.range(0)]);
  const std::vector<double> x(16, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(forward(m, x));
  state.SetLabel(kArchs[state.range(0)]);
}
BENCHMARK(BM_Forward)->DenseRange(0, 6);

// One forward/backward pass over a 32-sample batch, recorded on a reused tape.
void BM_ForwardBackward(benchmark::State& state) {
  const Model m = make_model(kArchs[state.range(0)]);
  const auto data = gen_two_gaussians(32, 16, 4.0, 0);
  ad::Tape tape;
  std::vector<double> adjoints;
  for (auto _ : state) {
    tape.clear();
    const Bindings bindings(tape, m.params());
    ad::VarVec losses;
    for (std::size_t i = 0; i < data.size(); ++i) {
      losses.push_back(sample_loss(m, bindings, tape, data.row(i), static_cast<std::size_t>(data.labels[i])));
    }
    const ad::Var loss = ad::sum(losses);
    adjoints = tape.backward(loss);
    benchmark::DoNotOptimize(adjoints.data());
  }
  state.SetLabel(kArchs[state.range(0)]);
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_ForwardBackward)->DenseRange(0, 6);

void BM_ScoreSample(benchmark::State& state) {
  const Model m = make_model(kArchs[state.range(0)]);
  const std::vector<double> x(16, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(score_sample(m, x));
  state.SetLabel(kArchs[state.range(0)]);
}
BENCHMARK(BM_ScoreSample)->DenseRange(0, 6);

}  // namespace

BENCHMARK_MAIN();
