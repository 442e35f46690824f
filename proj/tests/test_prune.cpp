#include <doctest.h>

#include <algorithm>
#include <set>

#include "spade/error.hpp"
#include "spade/prune.hpp"
#include "test_support.hpp"

using namespace spade;

namespace {

EdgeScoreTable table_for(const SparseGraph& g, Rng& rng) {
  Eigen::MatrixXd vectors(static_cast<Eigen::Index>(g.num_nodes()), 4);
  for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) vectors(i, j) = rng.uniform(-1.0, 1.0);
  }
  Eigen::VectorXd zetas(4);
  zetas << 4.0, 3.0, 2.0, 1.0;
  return spade_scores(make_embedding(zetas, vectors), g);
}

}  // namespace

TEST_CASE("prune: fraction zero and one") {
  Rng rng(157);
  const SparseGraph g = testing::random_connected_graph(rng, 18, 20);
  const EdgeScoreTable scores = table_for(g, rng);

  const PruneResult none = prune_graph(g, scores, {0.0});
  CHECK(none.pruned == g);
  CHECK(none.removed.empty());

  const PruneResult all = prune_graph(g, scores, {1.0});
  CHECK(all.pruned.num_edges() == 0);
  CHECK(all.pruned.num_nodes() == g.num_nodes());
  CHECK(all.removed.size() == g.num_edges());
}

TEST_CASE("prune removes exactly the floor of the budget, top scores first") {
  Rng rng(163);
  const SparseGraph g = testing::random_connected_graph(rng, 30, 41);
  const EdgeScoreTable scores = table_for(g, rng);
  const double fraction = 0.37;
  const PruneResult result = prune_graph(g, scores, {fraction});

  const auto budget = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(g.num_edges())));
  CHECK(result.removed.size() == budget);
  CHECK(result.pruned.num_edges() == g.num_edges() - budget);

  // Partition: removed and surviving edges split the original set.
  std::set<EdgePair> removed(result.removed.begin(), result.removed.end());
  CHECK(removed.size() == result.removed.size());
  for (const auto& [p, q] : result.pruned.canonical_pairs()) {
    CHECK(!removed.contains({p, q}));
    CHECK(g.has_edge(p, q));
  }

  // min removed score >= max survivor score
  double min_removed = std::numeric_limits<double>::infinity();
  const auto canonical = g.canonical_pairs();
  for (std::size_t i = 0; i < budget; ++i) {
    min_removed = std::min(min_removed, scores.scores[scores.ranking[i]]);
  }
  for (std::size_t i = budget; i < canonical.size(); ++i) {
    CHECK(scores.scores[scores.ranking[i]] <= min_removed);
  }

  // Deterministic
  const PruneResult again = prune_graph(g, scores, {fraction});
  CHECK(again.removed == result.removed);
  CHECK(again.pruned == result.pruned);
}

TEST_CASE("prune validates the score table alignment and fraction") {
  Rng rng(167);
  const SparseGraph g = testing::random_connected_graph(rng, 12, 10);
  EdgeScoreTable scores = table_for(g, rng);
  CHECK_THROWS_AS(prune_graph(g, scores, {-0.1}), ValidationError);
  CHECK_THROWS_AS(prune_graph(g, scores, {1.5}), ValidationError);

  std::swap(scores.edges[0], scores.edges[1]);
  CHECK_THROWS_AS(prune_graph(g, scores, {0.2}), ValidationError);
}

TEST_CASE("prune may disconnect nodes without repair") {
  // Star graph: removing the two highest-scoring edges isolates leaves.
  const SparseGraph star =
      SparseGraph::from_pairs(4, std::vector<EdgePair>{{0, 1}, {0, 2}, {0, 3}});
  EdgeScoreTable scores;
  scores.edges = star.canonical_pairs();
  scores.scores = {5.0, 1.0, 3.0};
  scores.ranking = {0, 2, 1};
  const PruneResult result = prune_graph(star, scores, {2.0 / 3.0});
  CHECK(result.removed == std::vector<EdgePair>{{0, 1}, {0, 3}});
  CHECK(result.pruned.degree(1) == 0);
  CHECK(result.pruned.degree(3) == 0);
  CHECK(result.pruned.has_edge(0, 2));
}
