#include "spade/convert.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "spade/dataset.hpp"
#include "spade/error.hpp"
#include "textio.hpp"

namespace spade {

namespace {

struct SparseDump {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Eigen::Triplet<double>> entries;
};

SparseDump read_sparse(const std::filesystem::path& path) {
  auto in = textio::open_input(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError(fmt::format("{}: empty file", path.string()));
  }
  textio::strip_cr(line);
  auto header = textio::split_ws(line);
  if (header.size() != 3) {
    throw ValidationError(fmt::format("{}: expected 'rows cols nnz' header", path.string()));
  }
  SparseDump dump;
  dump.rows = textio::parse_number<std::size_t>(header[0], path.string());
  dump.cols = textio::parse_number<std::size_t>(header[1], path.string());
  const auto nnz = textio::parse_number<std::size_t>(header[2], path.string());
  dump.entries.reserve(nnz);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    textio::strip_cr(line);
    ++lineno;
    if (line.empty()) continue;
    const auto tok = textio::split_ws(line);
    const std::string ctx = fmt::format("{} line {}", path.string(), lineno);
    if (tok.size() != 3) {
      throw ValidationError(fmt::format("{}: expected 'r c v'", ctx));
    }
    const auto r = textio::parse_number<std::size_t>(tok[0], ctx);
    const auto c = textio::parse_number<std::size_t>(tok[1], ctx);
    const auto v = textio::parse_number<double>(tok[2], ctx);
    if (r >= dump.rows || c >= dump.cols) {
      throw ValidationError(fmt::format("{}: entry ({}, {}) out of bounds", ctx, r, c));
    }
    dump.entries.emplace_back(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c), v);
  }
  if (dump.entries.size() != nnz) {
    throw ValidationError(fmt::format("{}: header promises {} entries, file has {}",
                                      path.string(), nnz, dump.entries.size()));
  }
  return dump;
}

struct DenseIntDump {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::vector<std::int64_t>> data;
};

DenseIntDump read_dense_int(const std::filesystem::path& path) {
  auto in = textio::open_input(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError(fmt::format("{}: empty file", path.string()));
  }
  textio::strip_cr(line);
  auto header = textio::split_ws(line);
  if (header.size() != 2) {
    throw ValidationError(fmt::format("{}: expected 'rows cols' header", path.string()));
  }
  DenseIntDump dump;
  dump.rows = textio::parse_number<std::size_t>(header[0], path.string());
  dump.cols = textio::parse_number<std::size_t>(header[1], path.string());
  dump.data.reserve(dump.rows);
  for (std::size_t r = 0; r < dump.rows; ++r) {
    if (!std::getline(in, line)) {
      throw ValidationError(fmt::format("{}: expected {} rows", path.string(), dump.rows));
    }
    textio::strip_cr(line);
    const auto tok = textio::split_ws(line);
    if (tok.size() != dump.cols) {
      throw ValidationError(
          fmt::format("{} row {}: expected {} columns, got {}", path.string(), r, dump.cols,
                      tok.size()));
    }
    std::vector<std::int64_t> row;
    row.reserve(dump.cols);
    for (const auto& t : tok) {
      row.push_back(textio::parse_number<std::int64_t>(
          t, fmt::format("{} row {}", path.string(), r)));
    }
    dump.data.push_back(std::move(row));
  }
  return dump;
}

std::int32_t argmax_row(const std::vector<std::int64_t>& row) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < row.size(); ++c) {
    if (row[c] > row[best]) best = c;
  }
  return static_cast<std::int32_t>(best);
}

}  // namespace

ConvertSummary convert_planetoid_dump(const std::filesystem::path& dump_dir,
                                      const std::filesystem::path& out_dir) {
  for (const char* name :
       {"allx.txt", "tx.txt", "y.txt", "ally.txt", "ty.txt", "graph.txt", "test.index"}) {
    if (!std::filesystem::exists(dump_dir / name)) {
      throw IoError(fmt::format("dump file missing: {}", (dump_dir / name).string()));
    }
  }

  const SparseDump allx = read_sparse(dump_dir / "allx.txt");
  const SparseDump tx = read_sparse(dump_dir / "tx.txt");
  const DenseIntDump y = read_dense_int(dump_dir / "y.txt");
  const DenseIntDump ally = read_dense_int(dump_dir / "ally.txt");
  const DenseIntDump ty = read_dense_int(dump_dir / "ty.txt");

  if (allx.cols != tx.cols) {
    throw ValidationError(fmt::format("feature width mismatch: allx has {}, tx has {}",
                                      allx.cols, tx.cols));
  }
  if (ally.cols != ty.cols || ally.cols != y.cols) {
    throw ValidationError("label width mismatch between y, ally, and ty");
  }
  if (ally.rows != allx.rows) {
    throw ValidationError(fmt::format("ally has {} rows but allx has {}", ally.rows, allx.rows));
  }
  if (ty.rows != tx.rows) {
    throw ValidationError(fmt::format("ty has {} rows but tx has {}", ty.rows, tx.rows));
  }

  // Graph: node count header plus raw directed entries.
  std::size_t n = 0;
  std::vector<EdgePair> raw_pairs;
  ConvertSummary summary;
  {
    auto in = textio::open_input(dump_dir / "graph.txt");
    std::string line;
    if (!std::getline(in, line)) {
      throw ValidationError("graph.txt: empty file");
    }
    textio::strip_cr(line);
    const auto header = textio::split_ws(line);
    if (header.size() != 2) {
      throw ValidationError("graph.txt: expected 'nodes entries' header");
    }
    n = textio::parse_number<std::size_t>(header[0], "graph.txt");
    const auto entries = textio::parse_number<std::size_t>(header[1], "graph.txt");
    raw_pairs.reserve(entries);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      textio::strip_cr(line);
      ++lineno;
      if (line.empty()) continue;
      const auto tok = textio::split_ws(line);
      const std::string ctx = fmt::format("graph.txt line {}", lineno);
      if (tok.size() != 2) {
        throw ValidationError(fmt::format("{}: expected 'u v'", ctx));
      }
      const auto u = textio::parse_number<NodeId>(tok[0], ctx);
      const auto v = textio::parse_number<NodeId>(tok[1], ctx);
      if (u >= n || v >= n) {
        throw ValidationError(fmt::format("{}: node out of range", ctx));
      }
      if (u == v) {
        ++summary.self_loop_entries_dropped;
        continue;
      }
      raw_pairs.emplace_back(std::min(u, v), std::max(u, v));
    }
  }
  std::sort(raw_pairs.begin(), raw_pairs.end());
  const std::size_t before_dedup = raw_pairs.size();
  raw_pairs.erase(std::unique(raw_pairs.begin(), raw_pairs.end()), raw_pairs.end());
  summary.duplicate_pairs_dropped = before_dedup - raw_pairs.size();

  // Test ids, one per tx row; gaps in the covered range become padded nodes.
  std::vector<std::size_t> test_ids;
  {
    auto in = textio::open_input(dump_dir / "test.index");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      textio::strip_cr(line);
      ++lineno;
      if (line.empty()) continue;
      test_ids.push_back(textio::parse_number<std::size_t>(
          line, fmt::format("test.index line {}", lineno)));
    }
  }
  if (test_ids.size() != tx.rows) {
    throw ValidationError(fmt::format("test.index has {} ids but tx has {} rows",
                                      test_ids.size(), tx.rows));
  }
  std::set<std::size_t> test_set(test_ids.begin(), test_ids.end());
  if (test_set.size() != test_ids.size()) {
    throw ValidationError("test.index contains duplicate ids");
  }
  for (const auto id : test_ids) {
    if (id < allx.rows || id >= n) {
      throw ValidationError(
          fmt::format("test id {} outside the expected range [{}, {})", id, allx.rows, n));
    }
  }

  DatasetBundle bundle;
  bundle.num_classes = ally.cols;
  bundle.labels.assign(n, 0);
  bundle.edge_list = std::move(raw_pairs);

  // Features: allx rows keep their position, tx row j lands at test_ids[j],
  // uncovered ids inside the test range stay zero (the padded nodes).
  {
    std::vector<Eigen::Triplet<double>> triplets = allx.entries;
    triplets.reserve(allx.entries.size() + tx.entries.size());
    for (const auto& t : tx.entries) {
      triplets.emplace_back(static_cast<Eigen::Index>(test_ids[static_cast<std::size_t>(t.row())]),
                            t.col(), t.value());
    }
    bundle.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(allx.cols));
    bundle.features.setFromTriplets(triplets.begin(), triplets.end());
  }

  for (std::size_t i = 0; i < ally.rows; ++i) {
    bundle.labels[i] = argmax_row(ally.data[i]);
  }
  for (std::size_t j = 0; j < ty.rows; ++j) {
    bundle.labels[test_ids[j]] = argmax_row(ty.data[j]);
  }
  summary.padded_nodes = n - allx.rows - test_ids.size();

  // Planetoid split: train = the y rows, val = the next 500 nodes.
  constexpr std::size_t kValSize = 500;
  bundle.train_mask.assign(n, 0);
  bundle.val_mask.assign(n, 0);
  bundle.test_mask.assign(n, 0);
  if (y.rows + kValSize > allx.rows) {
    throw ValidationError(
        fmt::format("train ({}) + val ({}) exceed the labeled region ({})", y.rows, kValSize,
                    allx.rows));
  }
  for (std::size_t i = 0; i < y.rows; ++i) bundle.train_mask[i] = 1;
  for (std::size_t i = y.rows; i < y.rows + kValSize; ++i) bundle.val_mask[i] = 1;
  for (const auto id : test_ids) bundle.test_mask[id] = 1;

  validate_bundle(bundle);
  save_dataset(bundle, out_dir);

  summary.nodes = n;
  summary.features = allx.cols;
  summary.classes = bundle.num_classes;
  summary.undirected_edges = bundle.edge_list.size();
  summary.train_nodes = y.rows;
  summary.val_nodes = kValSize;
  summary.test_nodes = test_ids.size();
  return summary;
}

}  // namespace spade
