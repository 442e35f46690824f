#include <doctest.h>

#include <fstream>

#include "spade/convert.hpp"
#include "spade/dataset.hpp"
#include "spade/error.hpp"
#include "test_support.hpp"

using namespace spade;

namespace {

DatasetBundle tiny_bundle() {
  DatasetBundle b;
  b.num_classes = 2;
  Eigen::MatrixXd dense(4, 3);
  dense << 1, 0, 0.25, 0, 0, 0, 0.5, 2, 0, 0, 1e-3, 7;
  b.features = dense.sparseView();
  b.labels = {0, 1, 0, 1};
  b.edge_list = {{0, 1}, {1, 2}, {2, 3}};
  b.train_mask = {1, 1, 0, 0};
  b.val_mask = {0, 0, 1, 0};
  b.test_mask = {0, 0, 0, 1};
  return b;
}

}  // namespace

TEST_CASE("dataset round-trips through the five-file directory") {
  const auto dir = testing::temp_dir("dataset_roundtrip");
  const DatasetBundle original = tiny_bundle();
  save_dataset(original, dir);
  const DatasetBundle loaded = load_dataset(dir);

  CHECK(loaded.num_nodes() == original.num_nodes());
  CHECK(loaded.num_classes == original.num_classes);
  CHECK(loaded.labels == original.labels);
  CHECK(loaded.edge_list == original.edge_list);
  CHECK(loaded.train_mask == original.train_mask);
  CHECK(loaded.val_mask == original.val_mask);
  CHECK(loaded.test_mask == original.test_mask);
  CHECK(Eigen::MatrixXd(loaded.features) == Eigen::MatrixXd(original.features));
}

TEST_CASE("loader rejects invalid datasets record by record") {
  SUBCASE("missing file names the file") {
    const auto dir = testing::temp_dir("dataset_missing");
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    try {
      load_dataset(dir);
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("meta.txt") != std::string::npos);
    }
  }
  SUBCASE("self-loop") {
    DatasetBundle b = tiny_bundle();
    b.edge_list.push_back({2, 2});
    CHECK_THROWS_WITH_AS(validate_bundle(b), "self-loop at node 2", ValidationError);
  }
  SUBCASE("duplicate edge") {
    DatasetBundle b = tiny_bundle();
    b.edge_list.push_back({0, 1});
    CHECK_THROWS_WITH_AS(validate_bundle(b), "duplicate edge (0, 1)", ValidationError);
  }
  SUBCASE("out-of-range label") {
    DatasetBundle b = tiny_bundle();
    b.labels[3] = 9;
    CHECK_THROWS_AS(validate_bundle(b), ValidationError);
  }
  SUBCASE("overlapping masks") {
    DatasetBundle b = tiny_bundle();
    b.val_mask[0] = 1;  // also in train
    CHECK_THROWS_AS(validate_bundle(b), ValidationError);
  }
  SUBCASE("class missing from the training mask") {
    DatasetBundle b = tiny_bundle();
    b.labels[1] = 0;  // class 1 now only outside train
    b.labels[3] = 1;
    CHECK_THROWS_AS(validate_bundle(b), ValidationError);
  }
}

TEST_CASE("graph file format round-trips bit-exactly") {
  const auto dir = testing::temp_dir("graph_roundtrip");

  SUBCASE("triangle writes one canonical line per edge") {
    const SparseGraph g =
        SparseGraph::from_pairs(3, std::vector<EdgePair>{{1, 0}, {2, 1}, {0, 2}});
    save_graph(g, dir / "triangle.graph");
    std::ifstream in(dir / "triangle.graph");
    std::string line;
    std::getline(in, line);
    CHECK(line == "nodes=3 edges=3");
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "0 1 1");
    CHECK(lines[1] == "0 2 1");
    CHECK(lines[2] == "1 2 1");
  }

  SUBCASE("empty graph is header-only") {
    const SparseGraph g = SparseGraph::from_pairs(5, {});
    save_graph(g, dir / "empty.graph");
    std::ifstream in(dir / "empty.graph");
    std::string line;
    std::getline(in, line);
    CHECK(line == "nodes=5 edges=0");
    CHECK(!std::getline(in, line));
    CHECK(load_graph(dir / "empty.graph") == g);
  }

  SUBCASE("random weighted graphs round-trip exactly") {
    Rng rng(101);
    for (int trial = 0; trial < 25; ++trial) {
      const std::size_t n = 2 + rng.below(60);
      const SparseGraph g = testing::random_connected_graph(rng, n, n / 2, 1e-7, 1e7);
      save_graph(g, dir / "random.graph");
      CHECK(load_graph(dir / "random.graph") == g);
    }
  }
}

TEST_CASE("feature row normalization divides by the L1 norm") {
  const auto dir = testing::temp_dir("dataset_norm");
  save_dataset(tiny_bundle(), dir);
  const DatasetBundle loaded = load_dataset(dir, true);
  const Eigen::MatrixXd feats(loaded.features);
  CHECK(feats.row(0).sum() == doctest::Approx(1.0));
  CHECK(feats.row(1).sum() == doctest::Approx(0.0));  // zero row stays zero
  CHECK(feats(0, 0) == doctest::Approx(1.0 / 1.25));
}

TEST_CASE("citeseer conversion reproduces the recorded counts") {
  const auto out = testing::temp_dir("citeseer_convert_unit");
  const ConvertSummary summary = convert_planetoid_dump(testing::citeseer_dump_dir(), out);

  // Counts recorded from the public distribution at conversion time.
  CHECK(summary.nodes == 3327);
  CHECK(summary.features == 3703);
  CHECK(summary.classes == 6);
  CHECK(summary.undirected_edges == 4552);
  CHECK(summary.train_nodes == 120);
  CHECK(summary.val_nodes == 500);
  CHECK(summary.test_nodes == 1000);
  CHECK(summary.self_loop_entries_dropped == 248);
  CHECK(summary.padded_nodes == 15);

  const DatasetBundle bundle = load_dataset(out);
  CHECK(bundle.num_nodes() == 3327);
  CHECK(bundle.num_features() == 3703);
  CHECK(bundle.num_classes == 6);
  CHECK(bundle.edge_list.size() == 4552);

  // Node 2407 is one of the padded test-range ids: zero features, label 0,
  // excluded from every mask, but still wired into the citation graph.
  CHECK(bundle.features.row(2407).nonZeros() == 0);
  CHECK(bundle.labels[2407] == 0);
  CHECK(!bundle.train_mask[2407]);
  CHECK(!bundle.val_mask[2407]);
  CHECK(!bundle.test_mask[2407]);
  CHECK(bundle.graph().degree(2407) > 0);

  // Planetoid split: 20 training nodes per class.
  std::vector<int> per_class(6, 0);
  for (std::size_t i = 0; i < bundle.num_nodes(); ++i) {
    if (bundle.train_mask[i]) ++per_class[static_cast<std::size_t>(bundle.labels[i])];
  }
  for (const int count : per_class) CHECK(count == 20);
}

TEST_CASE("citeseer graph save/load preserves the edge set") {
  const auto out = testing::temp_dir("citeseer_graph_roundtrip");
  convert_planetoid_dump(testing::citeseer_dump_dir(), out);
  const SparseGraph g = load_dataset(out).graph();
  save_graph(g, out / "citeseer.graph");
  const SparseGraph reloaded = load_graph(out / "citeseer.graph");
  CHECK(reloaded == g);
}
