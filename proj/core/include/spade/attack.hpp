#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "spade/dataset.hpp"
#include "spade/graph.hpp"

namespace spade {

struct AttackConfig {
  double rho = 0.0;                     ///< budget as a fraction of the original edge count
  std::size_t reference_edge_count = 0; ///< |E| of the original graph, shared across victims
};

struct AttackResult {
  std::vector<EdgePair> added_edges;  ///< (t, j) in generation order
  bool saturated = false;             ///< candidates ran out before the budget
  std::size_t valid_candidate_count = 0;  ///< edges an unbounded budget would collect
};

/// The full budget-free candidate sequence: every correctly classified test
/// node t (ascending index, one edge each) paired with its Euclidean-nearest
/// node j that has a different label and no existing or already-collected
/// edge. Ties break toward the lower node index.
std::vector<EdgePair> attack_candidate_sequence(const Eigen::MatrixXd& embeddings,
                                                const std::vector<std::int32_t>& labels,
                                                const Mask& test_mask, const Mask& correct_mask,
                                                const SparseGraph& graph);

/// Truncates the candidate sequence to floor(rho * reference_edge_count)
/// edges; saturated when the candidates ran out first. Budgets truncate one
/// shared sequence, so smaller budgets are prefixes of larger ones.
AttackResult generate_attack(const Eigen::MatrixXd& embeddings,
                             const std::vector<std::int32_t>& labels, const Mask& test_mask,
                             const Mask& correct_mask, const SparseGraph& graph,
                             const AttackConfig& cfg);

/// Budget bookkeeping shared by generate_attack and the pipeline's per-rho
/// slicing of a precomputed sequence.
AttackResult truncate_candidates(const std::vector<EdgePair>& sequence, const AttackConfig& cfg);

/// Injects the adversarial edges at unit weight. Edges already present in
/// this victim are skipped; the count lands in *skipped (diagnostics, not an
/// error — the set was generated against the original graph).
SparseGraph apply_attack(const SparseGraph& victim, const AttackResult& result,
                         std::size_t* skipped = nullptr);

/// Text export: header `rho=<r> saturated=<bool> count=<m>`, then one
/// `t j` line per added edge in generation order.
void save_attack(const AttackResult& result, double rho, const std::filesystem::path& path);
AttackResult load_attack(const std::filesystem::path& path, double* rho = nullptr);

}  // namespace spade
