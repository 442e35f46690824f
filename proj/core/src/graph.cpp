#include "spade/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include <fmt/format.h>

#include "spade/error.hpp"

namespace spade {

SparseGraph SparseGraph::from_edges(std::size_t num_nodes, std::span<const Edge> edges) {
  std::vector<Edge> sorted(edges.begin(), edges.end());
  for (auto& e : sorted) {
    if (e.p == e.q) {
      throw ValidationError(fmt::format("self-loop at node {}", e.p));
    }
    if (e.p >= num_nodes || e.q >= num_nodes) {
      throw ValidationError(
          fmt::format("edge ({}, {}) out of range for {} nodes", e.p, e.q, num_nodes));
    }
    if (!(e.weight > 0.0)) {
      throw ValidationError(
          fmt::format("edge ({}, {}) has nonpositive weight {}", e.p, e.q, e.weight));
    }
    if (e.p > e.q) std::swap(e.p, e.q);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.p, a.q) < std::tie(b.p, b.q); });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].p == sorted[i - 1].p && sorted[i].q == sorted[i - 1].q) {
      throw ValidationError(fmt::format("duplicate edge ({}, {})", sorted[i].p, sorted[i].q));
    }
  }

  SparseGraph g;
  g.num_nodes_ = num_nodes;
  g.num_edges_ = sorted.size();

  std::vector<std::size_t> deg(num_nodes, 0);
  for (const auto& e : sorted) {
    ++deg[e.p];
    ++deg[e.q];
  }
  g.row_offsets_.assign(num_nodes + 1, 0);
  std::partial_sum(deg.begin(), deg.end(), g.row_offsets_.begin() + 1);
  g.column_indices_.resize(2 * sorted.size());
  g.weights_.resize(2 * sorted.size());

  // Sweeping the lexicographically sorted edge list fills each CSR row in
  // ascending column order: mirrored entries (columns < p) all come from
  // earlier edges, direct entries (columns > p) arrive q-ascending.
  std::vector<std::size_t> cursor(g.row_offsets_.begin(), g.row_offsets_.end() - 1);
  for (const auto& e : sorted) {
    g.column_indices_[cursor[e.p]] = e.q;
    g.weights_[cursor[e.p]++] = e.weight;
    g.column_indices_[cursor[e.q]] = e.p;
    g.weights_[cursor[e.q]++] = e.weight;
  }
  return g;
}

SparseGraph SparseGraph::from_pairs(std::size_t num_nodes, std::span<const EdgePair> pairs,
                                    double weight) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& [p, q] : pairs) edges.push_back({p, q, weight});
  return from_edges(num_nodes, edges);
}

double SparseGraph::weighted_degree(NodeId p) const {
  double sum = 0.0;
  for (std::size_t i = row_offsets_[p]; i < row_offsets_[p + 1]; ++i) sum += weights_[i];
  return sum;
}

bool SparseGraph::has_edge(NodeId p, NodeId q) const {
  if (p >= num_nodes_ || q >= num_nodes_ || p == q) return false;
  auto begin = column_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[p]);
  auto end = column_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[p + 1]);
  return std::binary_search(begin, end, q);
}

double SparseGraph::edge_weight(NodeId p, NodeId q) const {
  auto begin = column_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[p]);
  auto end = column_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[p + 1]);
  auto it = std::lower_bound(begin, end, q);
  if (it == end || *it != q) {
    throw ValidationError(fmt::format("edge ({}, {}) not present", p, q));
  }
  return weights_[static_cast<std::size_t>(it - column_indices_.begin())];
}

std::vector<Edge> SparseGraph::canonical_edges() const {
  std::vector<Edge> edges;
  edges.reserve(num_edges_);
  for (NodeId p = 0; p < num_nodes_; ++p) {
    for (std::size_t i = row_offsets_[p]; i < row_offsets_[p + 1]; ++i) {
      if (column_indices_[i] > p) {
        edges.push_back({p, column_indices_[i], weights_[i]});
      }
    }
  }
  return edges;
}

std::vector<EdgePair> SparseGraph::canonical_pairs() const {
  std::vector<EdgePair> pairs;
  pairs.reserve(num_edges_);
  for (const auto& e : canonical_edges()) pairs.emplace_back(e.p, e.q);
  return pairs;
}

namespace {

EdgePair canonical(EdgePair e) {
  if (e.first > e.second) std::swap(e.first, e.second);
  return e;
}

}  // namespace

SparseGraph SparseGraph::remove_edges(std::span<const EdgePair> edges) const {
  std::vector<EdgePair> victims;
  victims.reserve(edges.size());
  for (auto e : edges) {
    if (!has_edge(e.first, e.second)) {
      throw ValidationError(fmt::format("cannot remove missing edge ({}, {})", e.first, e.second));
    }
    victims.push_back(canonical(e));
  }
  std::sort(victims.begin(), victims.end());
  victims.erase(std::unique(victims.begin(), victims.end()), victims.end());

  std::vector<Edge> kept;
  kept.reserve(num_edges_ - victims.size());
  for (const auto& e : canonical_edges()) {
    if (!std::binary_search(victims.begin(), victims.end(), EdgePair{e.p, e.q})) {
      kept.push_back(e);
    }
  }
  return from_edges(num_nodes_, kept);
}

SparseGraph SparseGraph::add_edges(std::span<const EdgePair> edges, double weight) const {
  std::vector<Edge> all = canonical_edges();
  for (auto e : edges) {
    if (e.first == e.second) {
      throw ValidationError(fmt::format("self-loop at node {}", e.first));
    }
    if (has_edge(e.first, e.second)) {
      throw ValidationError(fmt::format("edge ({}, {}) already present", e.first, e.second));
    }
    auto [p, q] = canonical(e);
    all.push_back({p, q, weight});
  }
  return from_edges(num_nodes_, all);
}

ComponentLabels connected_components(const SparseGraph& g) {
  const std::size_t n = g.num_nodes();
  ComponentLabels out;
  out.label.assign(n, static_cast<NodeId>(-1));
  std::vector<NodeId> stack;
  for (NodeId start = 0; start < n; ++start) {
    if (out.label[start] != static_cast<NodeId>(-1)) continue;
    const auto comp = static_cast<NodeId>(out.count++);
    out.label[start] = comp;
    stack.push_back(start);
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (std::size_t i = g.row_offsets()[u]; i < g.row_offsets()[u + 1]; ++i) {
        const NodeId v = g.column_indices()[i];
        if (out.label[v] == static_cast<NodeId>(-1)) {
          out.label[v] = comp;
          stack.push_back(v);
        }
      }
    }
  }
  return out;
}

Eigen::SparseMatrix<double, Eigen::RowMajor> gcn_normalized_adjacency(const SparseGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  std::vector<double> inv_sqrt(g.num_nodes());
  for (NodeId p = 0; p < g.num_nodes(); ++p) {
    inv_sqrt[p] = 1.0 / std::sqrt(g.weighted_degree(p) + 1.0);  // self-loop weight 1
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * g.num_edges() + g.num_nodes());
  for (NodeId p = 0; p < g.num_nodes(); ++p) {
    triplets.emplace_back(p, p, inv_sqrt[p] * inv_sqrt[p]);
    for (std::size_t i = g.row_offsets()[p]; i < g.row_offsets()[p + 1]; ++i) {
      const NodeId q = g.column_indices()[i];
      triplets.emplace_back(p, q, g.weights()[i] * inv_sqrt[p] * inv_sqrt[q]);
    }
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> ahat(n, n);
  ahat.setFromTriplets(triplets.begin(), triplets.end());
  return ahat;
}

}  // namespace spade
