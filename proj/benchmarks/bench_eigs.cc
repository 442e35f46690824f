#include <benchmark/benchmark.h>

#include "spade/laplacian.hpp"
#include "spade/spectral.hpp"
#include "test_support.hpp"

namespace {

using namespace spade;

void BM_GeneralizedEigs(benchmark::State& state) {
  Rng rng(4);
  const auto n = static_cast<std::size_t>(state.range(0));
  const SparseGraph gx = testing::random_connected_graph(rng, n, 3 * n);
  const SparseGraph gy = testing::random_connected_graph(rng, n, 3 * n);
  const LaplacianOperator lx(gx, LaplacianKind::combinatorial, 0.0);
  const LaplacianOperator ly(gy, LaplacianKind::combinatorial, pencil_regularizer(gy));
  const auto s = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(top_generalized_eigenpairs(lx, ly, s, 1e-6));
  }
}
BENCHMARK(BM_GeneralizedEigs)->Args({200, 8})->Args({1000, 16})->Unit(benchmark::kMillisecond);

void BM_SpadeScores(benchmark::State& state) {
  Rng rng(5);
  const auto n = static_cast<std::size_t>(state.range(0));
  const SparseGraph g = testing::random_connected_graph(rng, n, 5 * n);
  Eigen::MatrixXd vectors(static_cast<Eigen::Index>(n), 50);
  for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) vectors(i, j) = rng.uniform(-1.0, 1.0);
  }
  Eigen::VectorXd zetas = Eigen::VectorXd::LinSpaced(50, 50.0, 1.0);
  const SpectralEmbedding emb = make_embedding(zetas, vectors);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spade_scores(emb, g));
  }
}
BENCHMARK(BM_SpadeScores)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
