#pragma once

#include <cstdint>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

namespace spade {

using NodeId = std::uint32_t;
using EdgePair = std::pair<NodeId, NodeId>;

/// Undirected weighted edge in canonical (p < q) orientation.
struct Edge {
  NodeId p;
  NodeId q;
  double weight;
};

/// Undirected weighted graph in compressed sparse row form. Both directions
/// of every edge are stored so a matvec is a single row sweep. Immutable
/// after construction; the edit operations return new graphs.
class SparseGraph {
 public:
  SparseGraph() = default;

  /// Builds from canonical undirected edges. Throws ValidationError on
  /// self-loops, duplicates, out-of-range endpoints, or nonpositive weights.
  static SparseGraph from_edges(std::size_t num_nodes, std::span<const Edge> edges);
  static SparseGraph from_pairs(std::size_t num_nodes, std::span<const EdgePair> pairs,
                                double weight = 1.0);

  std::size_t num_nodes() const { return num_nodes_; }
  /// Number of undirected edges (each counted once).
  std::size_t num_edges() const { return num_edges_; }

  std::span<const std::size_t> row_offsets() const { return row_offsets_; }
  std::span<const NodeId> column_indices() const { return column_indices_; }
  std::span<const double> weights() const { return weights_; }

  std::size_t degree(NodeId p) const { return row_offsets_[p + 1] - row_offsets_[p]; }
  /// Sum of incident edge weights.
  double weighted_degree(NodeId p) const;

  bool has_edge(NodeId p, NodeId q) const;
  /// Weight of edge (p, q); throws ValidationError if absent.
  double edge_weight(NodeId p, NodeId q) const;

  /// Undirected edges in canonical order: lexicographic by (p, q), p < q.
  std::vector<Edge> canonical_edges() const;
  std::vector<EdgePair> canonical_pairs() const;

  /// New graph with the given undirected edges removed. Every pair must be
  /// present; throws ValidationError naming the first missing pair.
  SparseGraph remove_edges(std::span<const EdgePair> edges) const;

  /// New graph with the given undirected edges added at the given weight.
  /// Throws ValidationError on self-loops or already-present pairs.
  SparseGraph add_edges(std::span<const EdgePair> edges, double weight = 1.0) const;

  bool operator==(const SparseGraph& other) const = default;

 private:
  std::size_t num_nodes_ = 0;
  std::size_t num_edges_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<NodeId> column_indices_;
  std::vector<double> weights_;
};

/// Component label per node plus the number of components.
struct ComponentLabels {
  std::vector<NodeId> label;
  std::size_t count = 0;
};

ComponentLabels connected_components(const SparseGraph& g);

/// GCN propagation operator: Ahat = Dt^{-1/2} (A + I) Dt^{-1/2} where Dt is
/// the degree matrix of A + I. Isolated nodes get a 1.0 diagonal entry.
Eigen::SparseMatrix<double, Eigen::RowMajor> gcn_normalized_adjacency(const SparseGraph& g);

}  // namespace spade
