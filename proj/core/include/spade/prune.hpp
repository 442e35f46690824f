#pragma once

#include <vector>

#include "spade/graph.hpp"
#include "spade/spectral.hpp"

namespace spade {

struct PruneConfig {
  double fraction = 0.2;  ///< fraction of canonical undirected edges to delete
};

struct PruneResult {
  SparseGraph pruned;
  std::vector<EdgePair> removed;  ///< in ranked order, highest score first
};

/// Removes the floor(fraction * |E|) highest-scoring edges (score ties break
/// toward the lower canonical edge index). The score table must align with
/// the graph's canonical edge list.
PruneResult prune_graph(const SparseGraph& graph, const EdgeScoreTable& scores,
                        const PruneConfig& cfg);

}  // namespace spade
