#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "spade/graph.hpp"

namespace spade {

enum class KnnMethod {
  automatic,   ///< exact when N <= 4096, approximate above
  exact,
  approximate
};

struct KnnConfig {
  // Manifold sparsity drives how sharply edge scores separate: thinner
  // k-NN graphs make manifold-distant input edges stand out. k = 5 is the
  // measured default for the citation experiments.
  std::size_t k = 5;
  KnnMethod method = KnnMethod::automatic;
  // Approximate-index parameters.
  std::size_t max_links = 16;        // M
  std::size_t ef_construction = 200;
  std::size_t ef_search = 128;
};

/// Brute-force k-NN graph over row embeddings: each node picks its k nearest
/// other nodes by Euclidean distance (ties by lower node index); the directed
/// pick lists are symmetrized by union into a unit-weight undirected graph.
SparseGraph exact_knn_graph(const Eigen::MatrixXd& embeddings, const KnnConfig& cfg);

/// Same contract with approximate neighbor sets from a small-world index.
/// Build is single-threaded and deterministic.
SparseGraph approx_knn_graph(const Eigen::MatrixXd& embeddings, const KnnConfig& cfg);

/// Dispatches on cfg.method (automatic: exact up to 4096 nodes).
SparseGraph knn_graph(const Eigen::MatrixXd& embeddings, const KnnConfig& cfg);

}  // namespace spade
