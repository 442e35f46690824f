#include "spade/prune.hpp"

#include <cmath>

#include <fmt/format.h>

#include "spade/error.hpp"

namespace spade {

PruneResult prune_graph(const SparseGraph& graph, const EdgeScoreTable& scores,
                        const PruneConfig& cfg) {
  if (cfg.fraction < 0.0 || cfg.fraction > 1.0) {
    throw ValidationError(fmt::format("prune fraction {} outside [0, 1]", cfg.fraction));
  }
  const auto canonical = graph.canonical_pairs();
  if (scores.edges != canonical) {
    throw ValidationError("score table is not aligned with the graph's canonical edge list");
  }
  if (scores.ranking.size() != canonical.size()) {
    throw ValidationError("score table ranking has the wrong length");
  }

  const auto budget =
      static_cast<std::size_t>(std::floor(cfg.fraction * static_cast<double>(canonical.size())));
  PruneResult result;
  result.removed.reserve(budget);
  for (std::size_t i = 0; i < budget; ++i) {
    result.removed.push_back(canonical[scores.ranking[i]]);
  }
  result.pruned = graph.remove_edges(result.removed);
  return result;
}

}  // namespace spade
