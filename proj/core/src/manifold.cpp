#include "spade/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "spade/error.hpp"
#include "spade/hnsw.hpp"

namespace spade {

namespace {

constexpr std::size_t kExactCrossover = 4096;

void check_input(const Eigen::MatrixXd& embeddings, const KnnConfig& cfg) {
  const auto n = static_cast<std::size_t>(embeddings.rows());
  if (cfg.k < 1) {
    throw ValidationError("k must be at least 1");
  }
  if (n <= cfg.k) {
    throw ValidationError(fmt::format("need more than k={} nodes, got {}", cfg.k, n));
  }
  if (!embeddings.allFinite()) {
    throw NumericError("embeddings contain non-finite values");
  }
  if (cfg.ef_search < cfg.k || cfg.ef_construction < cfg.k) {
    throw ValidationError("search/construction beams must be at least k");
  }
}

SparseGraph union_graph(std::size_t n, const std::vector<std::vector<NodeId>>& picks) {
  std::vector<EdgePair> pairs;
  for (NodeId i = 0; i < n; ++i) {
    for (const NodeId j : picks[i]) {
      pairs.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return SparseGraph::from_pairs(n, pairs, 1.0);
}

}  // namespace

SparseGraph exact_knn_graph(const Eigen::MatrixXd& embeddings, const KnnConfig& cfg) {
  check_input(embeddings, cfg);
  const auto n = static_cast<std::size_t>(embeddings.rows());
  const auto dim = static_cast<std::size_t>(embeddings.cols());

  // Row-major copy so the inner distance loop is contiguous.
  std::vector<double> data(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      data[i * dim + j] = embeddings(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }

  std::vector<std::vector<NodeId>> picks(n);
  std::vector<std::pair<double, NodeId>> scored;
  scored.reserve(n - 1);
  for (NodeId i = 0; i < n; ++i) {
    scored.clear();
    const double* pi = data.data() + static_cast<std::size_t>(i) * dim;
    for (NodeId j = 0; j < n; ++j) {
      if (j == i) continue;
      const double* pj = data.data() + static_cast<std::size_t>(j) * dim;
      double sum = 0.0;
      for (std::size_t t = 0; t < dim; ++t) {
        const double diff = pi[t] - pj[t];
        sum += diff * diff;
      }
      scored.emplace_back(sum, j);
    }
    std::nth_element(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(cfg.k - 1),
                     scored.end());
    std::sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(cfg.k));
    picks[i].reserve(cfg.k);
    for (std::size_t t = 0; t < cfg.k; ++t) picks[i].push_back(scored[t].second);
  }
  return union_graph(n, picks);
}

SparseGraph approx_knn_graph(const Eigen::MatrixXd& embeddings, const KnnConfig& cfg) {
  check_input(embeddings, cfg);
  const auto n = static_cast<std::size_t>(embeddings.rows());

  HnswIndex::Params params;
  params.max_links = cfg.max_links;
  params.ef_construction = cfg.ef_construction;
  const HnswIndex index(embeddings, params);

  std::vector<std::vector<NodeId>> picks(n);
  for (NodeId i = 0; i < n; ++i) {
    picks[i] = index.query(i, cfg.k, cfg.ef_search);
    if (picks[i].size() < cfg.k) {
      // Beam exhausted its reachable set; top up by exact scan so every
      // node still contributes k outgoing picks.
      std::vector<std::uint8_t> have(n, 0);
      have[i] = 1;
      for (const NodeId j : picks[i]) have[j] = 1;
      std::vector<std::pair<double, NodeId>> rest;
      for (NodeId j = 0; j < n; ++j) {
        if (have[j]) continue;
        rest.emplace_back((embeddings.row(static_cast<Eigen::Index>(i)) -
                           embeddings.row(static_cast<Eigen::Index>(j)))
                              .squaredNorm(),
                          j);
      }
      std::sort(rest.begin(), rest.end());
      for (const auto& [dist, j] : rest) {
        if (picks[i].size() == cfg.k) break;
        picks[i].push_back(j);
      }
    }
  }
  return union_graph(n, picks);
}

SparseGraph knn_graph(const Eigen::MatrixXd& embeddings, const KnnConfig& cfg) {
  switch (cfg.method) {
    case KnnMethod::exact:
      return exact_knn_graph(embeddings, cfg);
    case KnnMethod::approximate:
      return approx_knn_graph(embeddings, cfg);
    case KnnMethod::automatic:
    default:
      return static_cast<std::size_t>(embeddings.rows()) <= kExactCrossover
                 ? exact_knn_graph(embeddings, cfg)
                 : approx_knn_graph(embeddings, cfg);
  }
}

}  // namespace spade
