#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "spade/graph.hpp"

namespace spade {

/// Hierarchical navigable small-world index over row vectors, Euclidean
/// metric. Insertion order and level draws are fixed by the seed, all
/// distance ties break toward the lower id, and construction is
/// single-threaded, so the index is fully deterministic. Queries are
/// read-only and safe to run concurrently.
class HnswIndex {
 public:
  struct Params {
    std::size_t max_links = 16;        // M; level 0 allows 2M
    std::size_t ef_construction = 200;
    std::uint64_t seed = 0x5eed5eedULL;
  };

  HnswIndex(const Eigen::MatrixXd& points, const Params& params);

  std::size_t size() const { return count_; }

  /// k nearest stored points to the stored point `id`, excluding itself.
  /// May return fewer than k ids if the beam exhausts its reachable set.
  std::vector<NodeId> query(NodeId id, std::size_t k, std::size_t ef) const;

 private:
  struct Candidate {
    double dist;
    NodeId id;
  };

  double distance(NodeId a, NodeId b) const;
  NodeId greedy_descend(NodeId entry, int from_level, int to_level, NodeId query) const;
  std::vector<Candidate> search_layer(NodeId query, NodeId entry, std::size_t ef,
                                      int level) const;
  void connect(NodeId node, const std::vector<Candidate>& neighbors, int level);

  std::size_t count_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;                                // row-major copy
  std::vector<int> levels_;                                 // top level per node
  std::vector<std::vector<std::vector<NodeId>>> links_;     // [node][level] -> neighbor ids
  NodeId entry_point_ = 0;
  int max_level_ = -1;
  Params params_;
};

}  // namespace spade
