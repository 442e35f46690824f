#include "spade/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include <fmt/format.h>

#include "spade/error.hpp"
#include "textio.hpp"

namespace spade {

std::vector<EdgePair> attack_candidate_sequence(const Eigen::MatrixXd& embeddings,
                                                const std::vector<std::int32_t>& labels,
                                                const Mask& test_mask, const Mask& correct_mask,
                                                const SparseGraph& graph) {
  const std::size_t n = graph.num_nodes();
  if (static_cast<std::size_t>(embeddings.rows()) != n || labels.size() != n ||
      test_mask.size() != n || correct_mask.size() != n) {
    throw DimensionError("attack inputs disagree on the node count");
  }
  bool any_correct = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (test_mask[i] && correct_mask[i]) {
      any_correct = true;
      break;
    }
  }
  if (!any_correct) {
    throw ValidationError("no correctly classified test nodes to attack from");
  }

  std::set<EdgePair> added_set;
  std::vector<EdgePair> sequence;
  for (NodeId t = 0; t < n; ++t) {
    if (!test_mask[t] || !correct_mask[t]) continue;
    const auto source_row = embeddings.row(static_cast<Eigen::Index>(t));
    double best_dist = std::numeric_limits<double>::infinity();
    NodeId best = t;
    for (NodeId j = 0; j < n; ++j) {
      if (j == t || labels[j] == labels[t]) continue;
      if (graph.has_edge(t, j)) continue;
      const EdgePair key{std::min(t, j), std::max(t, j)};
      if (added_set.contains(key)) continue;
      const double dist =
          (embeddings.row(static_cast<Eigen::Index>(j)) - source_row).squaredNorm();
      if (dist < best_dist) {  // strict: ties keep the lower index
        best_dist = dist;
        best = j;
      }
    }
    if (best == t) continue;  // no valid candidate for this source
    sequence.emplace_back(t, best);
    added_set.insert({std::min(t, best), std::max(t, best)});
  }
  return sequence;
}

AttackResult truncate_candidates(const std::vector<EdgePair>& sequence, const AttackConfig& cfg) {
  if (cfg.rho < 0.0) {
    throw ValidationError(fmt::format("attack budget rho={} is negative", cfg.rho));
  }
  const auto budget = static_cast<std::size_t>(
      std::floor(cfg.rho * static_cast<double>(cfg.reference_edge_count)));
  AttackResult result;
  result.valid_candidate_count = sequence.size();
  if (sequence.size() > budget) {
    result.added_edges.assign(sequence.begin(), sequence.begin() + static_cast<std::ptrdiff_t>(budget));
    result.saturated = false;
  } else {
    result.added_edges = sequence;
    result.saturated = sequence.size() < budget;
  }
  return result;
}

AttackResult generate_attack(const Eigen::MatrixXd& embeddings,
                             const std::vector<std::int32_t>& labels, const Mask& test_mask,
                             const Mask& correct_mask, const SparseGraph& graph,
                             const AttackConfig& cfg) {
  if (cfg.rho < 0.0) {
    throw ValidationError(fmt::format("attack budget rho={} is negative", cfg.rho));
  }
  return truncate_candidates(
      attack_candidate_sequence(embeddings, labels, test_mask, correct_mask, graph), cfg);
}

SparseGraph apply_attack(const SparseGraph& victim, const AttackResult& result,
                         std::size_t* skipped) {
  std::vector<EdgePair> to_add;
  std::set<EdgePair> seen;
  std::size_t skip_count = 0;
  for (const auto& [t, j] : result.added_edges) {
    const EdgePair key{std::min(t, j), std::max(t, j)};
    if (victim.has_edge(t, j) || seen.contains(key)) {
      ++skip_count;
      continue;
    }
    seen.insert(key);
    to_add.push_back(key);
  }
  if (skipped != nullptr) *skipped = skip_count;
  return victim.add_edges(to_add, 1.0);
}

void save_attack(const AttackResult& result, double rho, const std::filesystem::path& path) {
  auto out = textio::open_output(path);
  out << fmt::format("rho={} saturated={} count={}\n", rho,
                     result.saturated ? "true" : "false", result.added_edges.size());
  for (const auto& [t, j] : result.added_edges) {
    out << fmt::format("{} {}\n", t, j);
  }
  if (!out) {
    throw IoError(fmt::format("failed writing attack edges to {}", path.string()));
  }
}

AttackResult load_attack(const std::filesystem::path& path, double* rho) {
  auto in = textio::open_input(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError(fmt::format("{}: empty attack file", path.string()));
  }
  textio::strip_cr(line);
  const auto header = textio::split_ws(line);
  if (header.size() != 3) {
    throw ValidationError(fmt::format("{}: malformed header '{}'", path.string(), line));
  }
  AttackResult result;
  const double parsed_rho = textio::parse_number<double>(
      textio::expect_kv(header[0], "rho", path.string()), path.string());
  if (rho != nullptr) *rho = parsed_rho;
  const auto saturated = textio::expect_kv(header[1], "saturated", path.string());
  if (saturated != "true" && saturated != "false") {
    throw ValidationError(fmt::format("{}: saturated must be true/false", path.string()));
  }
  result.saturated = saturated == "true";
  const auto count = textio::parse_number<std::size_t>(
      textio::expect_kv(header[2], "count", path.string()), path.string());

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    textio::strip_cr(line);
    ++lineno;
    if (line.empty()) continue;
    const auto tok = textio::split_ws(line);
    const std::string ctx = fmt::format("{} line {}", path.string(), lineno);
    if (tok.size() != 2) {
      throw ValidationError(fmt::format("{}: expected 't j'", ctx));
    }
    result.added_edges.emplace_back(textio::parse_number<NodeId>(tok[0], ctx),
                                    textio::parse_number<NodeId>(tok[1], ctx));
  }
  if (result.added_edges.size() != count) {
    throw ValidationError(fmt::format("{}: header promises {} edges, file has {}", path.string(),
                                      count, result.added_edges.size()));
  }
  result.valid_candidate_count = result.added_edges.size();
  return result;
}

}  // namespace spade
