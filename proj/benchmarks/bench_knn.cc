#include <benchmark/benchmark.h>

#include "spade/manifold.hpp"
#include "test_support.hpp"

namespace {

using namespace spade;

Eigen::MatrixXd bench_points(std::size_t n, std::size_t dim) {
  Rng rng(3);
  Eigen::MatrixXd points(n, dim);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) points(i, j) = rng.uniform(-1.0, 1.0);
  }
  return points;
}

void BM_ExactKnn(benchmark::State& state) {
  const auto points = bench_points(static_cast<std::size_t>(state.range(0)), 64);
  KnnConfig cfg;
  cfg.k = 10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_knn_graph(points, cfg));
  }
}
BENCHMARK(BM_ExactKnn)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_ApproxKnn(benchmark::State& state) {
  const auto points = bench_points(static_cast<std::size_t>(state.range(0)), 64);
  KnnConfig cfg;
  cfg.k = 10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(approx_knn_graph(points, cfg));
  }
}
BENCHMARK(BM_ApproxKnn)->Arg(500)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

}  // namespace
