#include "spade/hnsw.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "spade/rng.hpp"

namespace spade {

namespace {

// (dist, id) ascending: the unique ordering used everywhere in the index.
struct Closer {
  bool operator()(const std::pair<double, NodeId>& a, const std::pair<double, NodeId>& b) const {
    return a.first < b.first || (a.first == b.first && a.second < b.second);
  }
};

}  // namespace

HnswIndex::HnswIndex(const Eigen::MatrixXd& points, const Params& params) : params_(params) {
  count_ = static_cast<std::size_t>(points.rows());
  dim_ = static_cast<std::size_t>(points.cols());
  data_.resize(count_ * dim_);
  for (std::size_t i = 0; i < count_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) {
      data_[i * dim_ + j] = points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }

  levels_.resize(count_);
  links_.resize(count_);
  Rng rng(params_.seed);
  const double inv_log_m = 1.0 / std::log(static_cast<double>(std::max<std::size_t>(2, params_.max_links)));

  for (NodeId node = 0; node < count_; ++node) {
    const double u = std::max(rng.uniform(), 1e-300);
    const int level = static_cast<int>(-std::log(u) * inv_log_m);
    levels_[node] = level;
    links_[node].assign(static_cast<std::size_t>(level) + 1, {});

    if (node == 0) {
      entry_point_ = 0;
      max_level_ = level;
      continue;
    }

    NodeId entry = entry_point_;
    if (max_level_ > level) {
      entry = greedy_descend(entry, max_level_, level + 1, node);
    }
    for (int l = std::min(level, max_level_); l >= 0; --l) {
      const auto found = search_layer(node, entry, params_.ef_construction, l);
      connect(node, found, l);
      entry = found.front().id;
    }
    if (level > max_level_) {
      max_level_ = level;
      entry_point_ = node;
    }
  }
}

double HnswIndex::distance(NodeId a, NodeId b) const {
  const double* pa = data_.data() + static_cast<std::size_t>(a) * dim_;
  const double* pb = data_.data() + static_cast<std::size_t>(b) * dim_;
  double sum = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) {
    const double diff = pa[j] - pb[j];
    sum += diff * diff;
  }
  return sum;
}

NodeId HnswIndex::greedy_descend(NodeId entry, int from_level, int to_level, NodeId query) const {
  NodeId current = entry;
  double current_dist = distance(query, current);
  for (int level = from_level; level >= to_level; --level) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (const NodeId neighbor : links_[current][static_cast<std::size_t>(level)]) {
        const double d = distance(query, neighbor);
        if (d < current_dist || (d == current_dist && neighbor < current)) {
          current = neighbor;
          current_dist = d;
          improved = true;
        }
      }
    }
  }
  return current;
}

std::vector<HnswIndex::Candidate> HnswIndex::search_layer(NodeId query, NodeId entry,
                                                          std::size_t ef, int level) const {
  using Entry = std::pair<double, NodeId>;
  // to_visit: closest first; result: farthest first so the worst pops.
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> to_visit;
  std::priority_queue<Entry, std::vector<Entry>, std::less<Entry>> result;
  std::vector<std::uint8_t> visited(count_, 0);

  const double entry_dist = distance(query, entry);
  to_visit.emplace(entry_dist, entry);
  result.emplace(entry_dist, entry);
  visited[entry] = 1;

  while (!to_visit.empty()) {
    const auto [dist, node] = to_visit.top();
    if (dist > result.top().first && result.size() >= ef) break;
    to_visit.pop();
    for (const NodeId neighbor : links_[node][static_cast<std::size_t>(level)]) {
      if (visited[neighbor]) continue;
      visited[neighbor] = 1;
      const double d = distance(query, neighbor);
      if (result.size() < ef || d < result.top().first ||
          (d == result.top().first && neighbor < result.top().second)) {
        to_visit.emplace(d, neighbor);
        result.emplace(d, neighbor);
        if (result.size() > ef) result.pop();
      }
    }
  }

  std::vector<Candidate> out;
  out.reserve(result.size());
  while (!result.empty()) {
    out.push_back({result.top().first, result.top().second});
    result.pop();
  }
  std::reverse(out.begin(), out.end());  // ascending (dist, id)
  return out;
}

void HnswIndex::connect(NodeId node, const std::vector<Candidate>& neighbors, int level) {
  const std::size_t cap = level == 0 ? 2 * params_.max_links : params_.max_links;
  auto& own = links_[node][static_cast<std::size_t>(level)];
  for (const auto& cand : neighbors) {
    if (own.size() >= cap) break;
    own.push_back(cand.id);
  }

  for (const NodeId neighbor : own) {
    auto& back = links_[neighbor][static_cast<std::size_t>(level)];
    back.push_back(node);
    if (back.size() > cap) {
      // Shrink to the cap closest links under the (dist, id) order.
      std::vector<std::pair<double, NodeId>> scored;
      scored.reserve(back.size());
      for (const NodeId id : back) scored.emplace_back(distance(neighbor, id), id);
      std::sort(scored.begin(), scored.end(), Closer{});
      back.clear();
      for (std::size_t i = 0; i < cap; ++i) back.push_back(scored[i].second);
    }
  }
}

std::vector<NodeId> HnswIndex::query(NodeId id, std::size_t k, std::size_t ef) const {
  const std::size_t beam = std::max(ef, k + 1);  // headroom for dropping self
  NodeId entry = entry_point_;
  if (max_level_ > 0) {
    entry = greedy_descend(entry, max_level_, 1, id);
  }
  const auto found = search_layer(id, entry, beam, 0);
  std::vector<NodeId> out;
  out.reserve(k);
  for (const auto& cand : found) {
    if (cand.id == id) continue;
    out.push_back(cand.id);
    if (out.size() == k) break;
  }
  return out;
}

}  // namespace spade
