#include "spade/dataset.hpp"

#include <algorithm>
#include <string>

#include <fmt/format.h>

#include "spade/error.hpp"
#include "textio.hpp"

namespace spade {

namespace {

constexpr const char* kMetaFile = "meta.txt";
constexpr const char* kFeaturesFile = "features.csv";
constexpr const char* kLabelsFile = "labels.txt";
constexpr const char* kEdgesFile = "edges.txt";
constexpr const char* kMasksFile = "masks.txt";

std::string require_line(std::ifstream& in, const std::string& context) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError(fmt::format("{}: unexpected end of file", context));
  }
  textio::strip_cr(line);
  return line;
}

}  // namespace

SparseGraph DatasetBundle::graph() const {
  return SparseGraph::from_pairs(num_nodes(), edge_list, 1.0);
}

void validate_bundle(const DatasetBundle& bundle) {
  const std::size_t n = bundle.num_nodes();
  if (static_cast<std::size_t>(bundle.features.rows()) != n) {
    throw ValidationError(fmt::format("feature rows ({}) != label count ({})",
                                      bundle.features.rows(), n));
  }
  if (bundle.train_mask.size() != n || bundle.val_mask.size() != n ||
      bundle.test_mask.size() != n) {
    throw ValidationError("mask length does not match node count");
  }
  if (bundle.num_classes == 0) {
    throw ValidationError("dataset declares zero classes");
  }

  for (std::size_t i = 0; i < n; ++i) {
    const int overlap = (bundle.train_mask[i] ? 1 : 0) + (bundle.val_mask[i] ? 1 : 0) +
                        (bundle.test_mask[i] ? 1 : 0);
    if (overlap > 1) {
      throw ValidationError(fmt::format("node {} appears in multiple masks", i));
    }
  }

  std::vector<bool> seen_in_train(bundle.num_classes, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = bundle.labels[i];
    if (label < 0 || static_cast<std::size_t>(label) >= bundle.num_classes) {
      throw ValidationError(
          fmt::format("label {} at node {} outside [0, {})", label, i, bundle.num_classes));
    }
    if (bundle.train_mask[i]) seen_in_train[static_cast<std::size_t>(label)] = true;
  }
  for (std::size_t c = 0; c < bundle.num_classes; ++c) {
    if (!seen_in_train[c]) {
      throw ValidationError(fmt::format("class {} has no training nodes", c));
    }
  }

  // Edge invariants (self-loops, duplicates, range) are enforced by the
  // graph constructor.
  SparseGraph::from_pairs(n, bundle.edge_list, 1.0);
  for (const auto& [p, q] : bundle.edge_list) {
    if (p >= q) {
      throw ValidationError(fmt::format("edge ({}, {}) not in canonical p < q order", p, q));
    }
  }
}

DatasetBundle load_dataset(const std::filesystem::path& directory, bool row_normalize) {
  for (const char* name : {kMetaFile, kFeaturesFile, kLabelsFile, kEdgesFile, kMasksFile}) {
    if (!std::filesystem::exists(directory / name)) {
      throw IoError(fmt::format("dataset file missing: {}", (directory / name).string()));
    }
  }

  DatasetBundle bundle;
  std::size_t n = 0;
  std::size_t d = 0;
  {
    auto in = textio::open_input(directory / kMetaFile);
    n = textio::parse_number<std::size_t>(
        textio::expect_kv(require_line(in, kMetaFile), "nodes", kMetaFile), kMetaFile);
    d = textio::parse_number<std::size_t>(
        textio::expect_kv(require_line(in, kMetaFile), "features", kMetaFile), kMetaFile);
    bundle.num_classes = textio::parse_number<std::size_t>(
        textio::expect_kv(require_line(in, kMetaFile), "classes", kMetaFile), kMetaFile);
  }

  {
    auto in = textio::open_input(directory / kFeaturesFile);
    std::vector<Eigen::Triplet<double>> triplets;
    std::string line;
    for (std::size_t row = 0; row < n; ++row) {
      line = require_line(in, kFeaturesFile);
      std::size_t col = 0;
      std::size_t start = 0;
      while (start <= line.size()) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) comma = line.size();
        const std::string_view token(line.data() + start, comma - start);
        if (col >= d) {
          throw ValidationError(
              fmt::format("{}: row {} has more than {} values", kFeaturesFile, row, d));
        }
        const double value = textio::parse_number<double>(
            token, fmt::format("{} row {} col {}", kFeaturesFile, row, col));
        if (value != 0.0) {
          triplets.emplace_back(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col),
                                value);
        }
        ++col;
        start = comma + 1;
        if (comma == line.size()) break;
      }
      if (col != d) {
        throw ValidationError(
            fmt::format("{}: row {} has {} values, expected {}", kFeaturesFile, row, col, d));
      }
    }
    bundle.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    bundle.features.setFromTriplets(triplets.begin(), triplets.end());
  }

  if (row_normalize) {
    for (Eigen::Index row = 0; row < bundle.features.rows(); ++row) {
      double sum = 0.0;
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(bundle.features, row);
           it; ++it) {
        sum += std::abs(it.value());
      }
      if (sum > 0.0) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(bundle.features, row);
             it; ++it) {
          it.valueRef() /= sum;
        }
      }
    }
  }

  {
    auto in = textio::open_input(directory / kLabelsFile);
    bundle.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      bundle.labels.push_back(textio::parse_number<std::int32_t>(
          require_line(in, kLabelsFile), fmt::format("{} line {}", kLabelsFile, i)));
    }
  }

  {
    auto in = textio::open_input(directory / kEdgesFile);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      textio::strip_cr(line);
      ++lineno;
      if (line.empty()) continue;
      const auto tokens = textio::split_ws(line);
      if (tokens.size() != 2) {
        throw ValidationError(
            fmt::format("{} line {}: expected 'p q', got '{}'", kEdgesFile, lineno, line));
      }
      const auto p = textio::parse_number<NodeId>(tokens[0],
                                                  fmt::format("{} line {}", kEdgesFile, lineno));
      const auto q = textio::parse_number<NodeId>(tokens[1],
                                                  fmt::format("{} line {}", kEdgesFile, lineno));
      bundle.edge_list.emplace_back(p, q);
    }
  }

  {
    auto in = textio::open_input(directory / kMasksFile);
    bundle.train_mask.assign(n, 0);
    bundle.val_mask.assign(n, 0);
    bundle.test_mask.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string tag = require_line(in, kMasksFile);
      if (tag == "train") {
        bundle.train_mask[i] = 1;
      } else if (tag == "val") {
        bundle.val_mask[i] = 1;
      } else if (tag == "test") {
        bundle.test_mask[i] = 1;
      } else if (tag != "none") {
        throw ValidationError(
            fmt::format("{} line {}: unknown mask tag '{}'", kMasksFile, i + 1, tag));
      }
    }
  }

  validate_bundle(bundle);
  return bundle;
}

void save_dataset(const DatasetBundle& bundle, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  const std::size_t n = bundle.num_nodes();
  const std::size_t d = bundle.num_features();

  {
    auto out = textio::open_output(directory / kMetaFile);
    out << fmt::format("nodes={}\nfeatures={}\nclasses={}\n", n, d, bundle.num_classes);
  }
  {
    auto out = textio::open_output(directory / kFeaturesFile);
    std::string row;
    for (std::size_t i = 0; i < n; ++i) {
      row.clear();
      Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(
          bundle.features, static_cast<Eigen::Index>(i));
      for (std::size_t col = 0; col < d; ++col) {
        if (col > 0) row.push_back(',');
        if (it && static_cast<std::size_t>(it.col()) == col) {
          row += textio::full_precision(it.value());
          ++it;
        } else {
          row.push_back('0');
        }
      }
      row.push_back('\n');
      out << row;
    }
  }
  {
    auto out = textio::open_output(directory / kLabelsFile);
    for (std::size_t i = 0; i < n; ++i) out << bundle.labels[i] << '\n';
  }
  {
    auto out = textio::open_output(directory / kEdgesFile);
    for (const auto& [p, q] : bundle.edge_list) out << fmt::format("{} {}\n", p, q);
  }
  {
    auto out = textio::open_output(directory / kMasksFile);
    for (std::size_t i = 0; i < n; ++i) {
      const char* tag = bundle.train_mask[i]  ? "train"
                        : bundle.val_mask[i]  ? "val"
                        : bundle.test_mask[i] ? "test"
                                              : "none";
      out << tag << '\n';
    }
  }
}

void save_graph(const SparseGraph& g, const std::filesystem::path& path) {
  auto out = textio::open_output(path);
  out << fmt::format("nodes={} edges={}\n", g.num_nodes(), g.num_edges());
  for (const auto& e : g.canonical_edges()) {
    out << fmt::format("{} {} {}\n", e.p, e.q, textio::full_precision(e.weight));
  }
  if (!out) {
    throw IoError(fmt::format("failed writing graph to {}", path.string()));
  }
}

SparseGraph load_graph(const std::filesystem::path& path) {
  auto in = textio::open_input(path);
  const std::string header = require_line(in, path.string());
  const auto tokens = textio::split_ws(header);
  if (tokens.size() != 2) {
    throw ValidationError(fmt::format("{}: malformed header '{}'", path.string(), header));
  }
  const auto n = textio::parse_number<std::size_t>(
      textio::expect_kv(tokens[0], "nodes", path.string()), path.string());
  const auto m = textio::parse_number<std::size_t>(
      textio::expect_kv(tokens[1], "edges", path.string()), path.string());

  std::vector<Edge> edges;
  edges.reserve(m);
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    textio::strip_cr(line);
    ++lineno;
    if (line.empty()) continue;
    const auto parts = textio::split_ws(line);
    if (parts.size() != 3) {
      throw ValidationError(
          fmt::format("{} line {}: expected 'p q w', got '{}'", path.string(), lineno, line));
    }
    const std::string ctx = fmt::format("{} line {}", path.string(), lineno);
    edges.push_back({textio::parse_number<NodeId>(parts[0], ctx),
                     textio::parse_number<NodeId>(parts[1], ctx),
                     textio::parse_number<double>(parts[2], ctx)});
  }
  if (edges.size() != m) {
    throw ValidationError(
        fmt::format("{}: header promises {} edges, file has {}", path.string(), m, edges.size()));
  }
  return SparseGraph::from_edges(n, edges);
}

}  // namespace spade
