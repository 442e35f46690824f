#include <benchmark/benchmark.h>

#include "spade/laplacian.hpp"
#include "test_support.hpp"

namespace {

using namespace spade;

void BM_LaplacianMatvec(benchmark::State& state) {
  Rng rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const SparseGraph g = testing::random_connected_graph(rng, n, 4 * n);
  const LaplacianOperator op(g, LaplacianKind::combinatorial);
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(-1.0, 1.0);
  Eigen::VectorXd y(x.size());
  for (auto _ : state) {
    op.matvec(std::span<const double>(x.data(), n), std::span<double>(y.data(), n));
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * g.num_edges()));
}
BENCHMARK(BM_LaplacianMatvec)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_QuadraticForm(benchmark::State& state) {
  Rng rng(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  const SparseGraph g = testing::random_connected_graph(rng, n, 4 * n);
  const LaplacianOperator op(g, LaplacianKind::combinatorial);
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(-1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(op.quadratic_form(x));
  }
}
BENCHMARK(BM_QuadraticForm)->Arg(1000)->Arg(10000)->Arg(100000);

}  // namespace
