#pragma once

#include <cstddef>
#include <filesystem>

namespace spade {

struct ConvertSummary {
  std::size_t nodes = 0;
  std::size_t features = 0;
  std::size_t classes = 0;
  std::size_t undirected_edges = 0;
  std::size_t self_loop_entries_dropped = 0;
  std::size_t duplicate_pairs_dropped = 0;
  std::size_t train_nodes = 0;
  std::size_t val_nodes = 0;
  std::size_t test_nodes = 0;
  std::size_t padded_nodes = 0;  ///< nodes with no feature/label row in the source
};

/// Converts a plain-text dump of a Planetoid-style citation benchmark
/// (allx/tx/y/ally/ty/graph/test.index, see tools/export_planetoid.py) into
/// the portable five-file dataset directory.
///
/// Assembly follows the upstream loader semantics: test feature/label rows
/// are placed at the node ids listed in test.index, id gaps inside the test
/// range become zero rows (label 0, no mask), the train mask covers the
/// first y-rows nodes, and the validation mask covers the next 500. The
/// adjacency is symmetrized, self-loops are dropped, and duplicate pairs
/// are collapsed into canonical p < q edges.
ConvertSummary convert_planetoid_dump(const std::filesystem::path& dump_dir,
                                      const std::filesystem::path& out_dir);

}  // namespace spade
