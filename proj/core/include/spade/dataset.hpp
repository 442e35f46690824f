#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/SparseCore>

#include "spade/graph.hpp"

namespace spade {

using Mask = std::vector<std::uint8_t>;

/// A transductive node-classification dataset: features, labels, the
/// citation graph's edge list, and disjoint train/val/test masks.
struct DatasetBundle {
  Eigen::SparseMatrix<double, Eigen::RowMajor> features;  // N x d
  std::vector<std::int32_t> labels;                       // values in [0, C)
  std::vector<EdgePair> edge_list;                        // canonical p < q
  Mask train_mask;
  Mask val_mask;
  Mask test_mask;
  std::size_t num_classes = 0;

  std::size_t num_nodes() const { return labels.size(); }
  std::size_t num_features() const { return static_cast<std::size_t>(features.cols()); }

  /// Unit-weight graph over the bundle's edge list.
  SparseGraph graph() const;
};

/// Throws ValidationError on the first violated bundle invariant.
void validate_bundle(const DatasetBundle& bundle);

/// Loads the five-file dataset directory (meta.txt, features.csv,
/// labels.txt, edges.txt, masks.txt). Validates every invariant.
/// row_normalize divides each feature row by its L1 norm (zero rows kept).
DatasetBundle load_dataset(const std::filesystem::path& directory, bool row_normalize = false);

/// Writes the five-file directory; load_dataset(save_dataset(b)) == b.
void save_dataset(const DatasetBundle& bundle, const std::filesystem::path& directory);

/// Edge-list graph format: header `nodes=N edges=M`, then `p q w` lines,
/// canonical order, full-precision weights. Round-trips bit-exactly.
void save_graph(const SparseGraph& g, const std::filesystem::path& path);
SparseGraph load_graph(const std::filesystem::path& path);

}  // namespace spade
