#include <benchmark/benchmark.h>

#include "spade/gcn.hpp"
#include "test_support.hpp"

namespace {

using namespace spade;

void BM_GcnEpoch(benchmark::State& state) {
  Rng rng(6);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto inst = testing::random_instance(rng, n, 128, 4, 3 * n);
  GcnHyper hyper;
  hyper.hidden_dim = 64;
  const GcnModel model = init_model(128, 4, hyper);
  const SpMat norm_adj = gcn_normalized_adjacency(inst.graph);
  Rng dropout_rng(7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(loss_and_gradients(model, norm_adj, inst.bundle.features,
                                                inst.bundle.labels, inst.bundle.train_mask,
                                                &dropout_rng));
  }
}
BENCHMARK(BM_GcnEpoch)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_GcnForwardEval(benchmark::State& state) {
  Rng rng(8);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto inst = testing::random_instance(rng, n, 128, 4, 3 * n);
  GcnHyper hyper;
  hyper.hidden_dim = 64;
  const GcnModel model = init_model(128, 4, hyper);
  const SpMat norm_adj = gcn_normalized_adjacency(inst.graph);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        forward(model, norm_adj, inst.bundle.features, ForwardMode::eval, nullptr));
  }
}
BENCHMARK(BM_GcnForwardEval)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace
