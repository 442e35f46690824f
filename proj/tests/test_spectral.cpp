#include <doctest.h>

#include <algorithm>
#include <numeric>

#include <Eigen/Dense>

#include "spade/error.hpp"
#include "spade/laplacian.hpp"
#include "spade/spectral.hpp"
#include "test_support.hpp"

using namespace spade;
using spade::testing::dense_laplacian;
using spade::testing::random_component_graph;
using spade::testing::random_connected_graph;

namespace {

EigsOptions tight_options(std::uint64_t seed) {
  EigsOptions opt;
  opt.tol = 1e-9;
  opt.seed = seed;
  opt.max_sweeps = 2000;
  return opt;
}

SparseGraph scale_weights(const SparseGraph& g, double factor) {
  auto edges = g.canonical_edges();
  for (auto& e : edges) e.weight *= factor;
  return SparseGraph::from_edges(g.num_nodes(), edges);
}

}  // namespace

TEST_CASE("identity pencil: L_X = L_Y gives unit eigenvalues") {
  Rng rng(103);
  const SparseGraph g = random_connected_graph(rng, 24, 30);
  const LaplacianOperator lx(g, LaplacianKind::combinatorial, 0.0);
  const LaplacianOperator ly(g, LaplacianKind::combinatorial, 0.0);
  const SpectralEmbedding emb = top_generalized_eigenpairs(lx, ly, 3, 1e-8);
  for (Eigen::Index i = 0; i < emb.zetas.size(); ++i) {
    CHECK(emb.zetas[i] == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("scaled pencil: L_X = 2 L_Y gives eigenvalue 2") {
  Rng rng(107);
  const SparseGraph g = random_connected_graph(rng, 20, 24);
  const SparseGraph doubled = scale_weights(g, 2.0);
  const LaplacianOperator lx(doubled, LaplacianKind::combinatorial, 0.0);
  const LaplacianOperator ly(g, LaplacianKind::combinatorial, 0.0);
  const SpectralEmbedding emb = top_generalized_eigenpairs(lx, ly, 4, 1e-8);
  for (Eigen::Index i = 0; i < emb.zetas.size(); ++i) {
    CHECK(emb.zetas[i] == doctest::Approx(2.0).epsilon(1e-8));
  }
}

TEST_CASE("dense oracle: two-node pencil") {
  const SparseGraph g = SparseGraph::from_pairs(2, std::vector<EdgePair>{{0, 1}});
  const Eigen::MatrixXd lap = dense_laplacian(g, LaplacianKind::combinatorial);
  const DenseEigResult result = dense_generalized_eig_oracle(lap, lap, 1);
  CHECK(result.zetas[0] == doctest::Approx(1.0).epsilon(1e-12));
  // v = +-(1,-1)/2 under v' L_Y v = 1.
  CHECK(std::abs(result.vectors(0, 0)) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(std::abs(result.vectors(1, 0)) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(result.vectors(0, 0) * result.vectors(1, 0) < 0.0);
}

TEST_CASE("dense oracle: identity pencil on a 4-cycle") {
  const SparseGraph g =
      SparseGraph::from_pairs(4, std::vector<EdgePair>{{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  const Eigen::MatrixXd lap = dense_laplacian(g, LaplacianKind::combinatorial);
  const DenseEigResult result = dense_generalized_eig_oracle(lap, lap, 3);
  for (Eigen::Index i = 0; i < result.zetas.size(); ++i) {
    CHECK(result.zetas[i] == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("dense oracle guard rail and range checks") {
  const Eigen::MatrixXd big = Eigen::MatrixXd::Zero(501, 501);
  CHECK_THROWS_AS(dense_generalized_eig_oracle(big, big, 1), ValidationError);

  const SparseGraph g = SparseGraph::from_pairs(3, std::vector<EdgePair>{{0, 1}, {1, 2}});
  const Eigen::MatrixXd lap = dense_laplacian(g, LaplacianKind::combinatorial);
  CHECK_THROWS_AS(dense_generalized_eig_oracle(lap, lap, 3), ValidationError);  // s > N-1
}

TEST_CASE("iterative solver matches the dense oracle on random pencils") {
  Rng rng(109);
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t n = 30 + rng.below(50);
    const SparseGraph gx = random_connected_graph(rng, n, n);
    const bool disconnected = trial % 2 == 1;
    const SparseGraph gy = disconnected ? random_component_graph(rng, n, 3)
                                        : random_connected_graph(rng, n, n / 2);
    const double eps = pencil_regularizer(gy);
    const std::size_t s = 4 + rng.below(5);

    const LaplacianOperator lx(gx, LaplacianKind::combinatorial, 0.0);
    const LaplacianOperator ly(gy, LaplacianKind::combinatorial, eps);
    const SpectralEmbedding iterative =
        top_generalized_eigenpairs(lx, ly, s, tight_options(1000 + trial));
    const DenseEigResult oracle =
        dense_generalized_eig_oracle(dense_laplacian(gx, LaplacianKind::combinatorial),
                                     dense_laplacian(gy, LaplacianKind::combinatorial), s, eps);

    for (std::size_t i = 0; i < s; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      CHECK(iterative.zetas[ii] ==
            doctest::Approx(oracle.zetas[ii]).epsilon(1e-6));
    }
  }
}

TEST_CASE("eigenpairs satisfy the residual and orthonormality contracts") {
  Rng rng(113);
  const SparseGraph gx = random_connected_graph(rng, 60, 80);
  const SparseGraph gy = random_component_graph(rng, 60, 2);
  const double eps = pencil_regularizer(gy);
  const LaplacianOperator lx(gx, LaplacianKind::combinatorial, 0.0);
  const LaplacianOperator ly(gy, LaplacianKind::combinatorial, eps);
  const std::size_t s = 6;
  EigsOptions options;
  options.tol = 1e-6;  // the advertised default-residual contract
  options.seed = 2024;
  options.max_sweeps = 2000;
  const SpectralEmbedding emb = top_generalized_eigenpairs(lx, ly, s, options);

  // zetas nonincreasing and nonnegative
  for (std::size_t i = 1; i < s; ++i) {
    CHECK(emb.zetas[static_cast<Eigen::Index>(i)] <=
          emb.zetas[static_cast<Eigen::Index>(i - 1)]);
  }
  CHECK(emb.zetas.minCoeff() >= 0.0);

  // L_Y-orthonormality in the regularized operator's inner product
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = i; j < s; ++j) {
      const Eigen::VectorXd byj = ly.matvec(emb.vectors.col(static_cast<Eigen::Index>(j)));
      const double inner = emb.vectors.col(static_cast<Eigen::Index>(i)).dot(byj);
      CHECK(inner == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-8));
    }
  }

  // Deflated residuals within the advertised bound
  const auto null_basis = ly.null_basis();
  for (std::size_t i = 0; i < s; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const Eigen::VectorXd v = emb.vectors.col(ii);
    const Eigen::VectorXd byv = ly.matvec(v);
    Eigen::VectorXd residual = lx.matvec(v) - emb.zetas[ii] * byv;
    for (const auto& u : null_basis) residual -= u * u.dot(residual);
    CHECK(residual.norm() <= 1e-6 * std::max(emb.zetas[ii] * byv.norm(), 1e-12));
    CHECK(emb.diag.residual_norms[i] <= 1e-6 * std::max(emb.zetas[ii] * byv.norm(), 1e-12));
  }

  // vs columns carry the sqrt(zeta) weighting
  for (std::size_t i = 0; i < s; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const Eigen::VectorXd expected = emb.vectors.col(ii) * std::sqrt(emb.zetas[ii]);
    CHECK((emb.vs.col(ii) - expected).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("subspace nesting: growing s preserves the leading pairs") {
  Rng rng(127);
  const SparseGraph gx = random_connected_graph(rng, 40, 50);
  const SparseGraph gy = random_connected_graph(rng, 40, 30);
  const Eigen::MatrixXd lxd = dense_laplacian(gx, LaplacianKind::combinatorial);
  const Eigen::MatrixXd lyd = dense_laplacian(gy, LaplacianKind::combinatorial);
  const double eps = pencil_regularizer(gy);

  const DenseEigResult small = dense_generalized_eig_oracle(lxd, lyd, 5, eps);
  const DenseEigResult large = dense_generalized_eig_oracle(lxd, lyd, 9, eps);
  for (Eigen::Index i = 0; i < 5; ++i) {
    CHECK(small.zetas[i] == doctest::Approx(large.zetas[i]).epsilon(1e-10));
  }
}

TEST_CASE("solver rejects bad parameters") {
  Rng rng(131);
  const SparseGraph g = random_connected_graph(rng, 10, 8);
  const LaplacianOperator lx(g, LaplacianKind::combinatorial, 0.0);
  const LaplacianOperator ly(g, LaplacianKind::combinatorial, 0.0);
  CHECK_THROWS_AS(top_generalized_eigenpairs(lx, ly, 10, 1e-6), ValidationError);  // s > N-1
  CHECK_THROWS_AS(top_generalized_eigenpairs(lx, ly, 0, 1e-6), ValidationError);
  CHECK_THROWS_AS(top_generalized_eigenpairs(lx, ly, 2, -1.0), ValidationError);
}

TEST_CASE("spade scores: single-column definition") {
  const SparseGraph g = SparseGraph::from_pairs(4, std::vector<EdgePair>{{0, 1}, {1, 2}, {2, 3}});
  Eigen::VectorXd zetas(1);
  zetas << 1.0;
  Eigen::MatrixXd vectors(4, 1);
  vectors << 0.1, 0.5, -0.25, 2.0;
  const SpectralEmbedding emb = make_embedding(zetas, vectors);
  const EdgeScoreTable table = spade_scores(emb, g);
  REQUIRE(table.scores.size() == 3);
  CHECK(table.scores[0] == doctest::Approx((0.1 - 0.5) * (0.1 - 0.5)));
  CHECK(table.scores[1] == doctest::Approx((0.5 + 0.25) * (0.5 + 0.25)));
  CHECK(table.scores[2] == doctest::Approx((-0.25 - 2.0) * (-0.25 - 2.0)));
}

TEST_CASE("spade scores: all-zero embedding gives identity ranking") {
  const SparseGraph g = SparseGraph::from_pairs(5, std::vector<EdgePair>{{0, 1}, {0, 2}, {3, 4}});
  Eigen::VectorXd zetas = Eigen::VectorXd::Zero(2);
  const SpectralEmbedding emb = make_embedding(zetas, Eigen::MatrixXd::Zero(5, 2));
  const EdgeScoreTable table = spade_scores(emb, g);
  for (const double score : table.scores) CHECK(score == 0.0);
  std::vector<std::size_t> identity(table.ranking.size());
  std::iota(identity.begin(), identity.end(), 0);
  CHECK(table.ranking == identity);
}

TEST_CASE("spade scores match the dense incidence-form oracle") {
  Rng rng(137);
  const SparseGraph gx = random_connected_graph(rng, 60, 90);
  const SparseGraph gy = random_connected_graph(rng, 60, 45);
  const double eps = pencil_regularizer(gy);
  const DenseEigResult oracle =
      dense_generalized_eig_oracle(dense_laplacian(gx, LaplacianKind::combinatorial),
                                   dense_laplacian(gy, LaplacianKind::combinatorial), 8, eps);
  const SpectralEmbedding emb = make_embedding(oracle.zetas, oracle.vectors);
  const EdgeScoreTable table = spade_scores(emb, gx);

  // Independent route: score = e_{p,q}' Vs Vs' e_{p,q} via the dense Gram.
  const Eigen::MatrixXd gram = emb.vs * emb.vs.transpose();
  const auto edges = gx.canonical_pairs();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [p, q] = edges[e];
    const double expected = gram(p, p) + gram(q, q) - 2.0 * gram(p, q);
    CHECK(table.scores[e] == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("spade scores are invariant to eigenvector sign flips") {
  Rng rng(139);
  const SparseGraph gx = random_connected_graph(rng, 30, 40);
  const SparseGraph gy = random_connected_graph(rng, 30, 20);
  const DenseEigResult oracle =
      dense_generalized_eig_oracle(dense_laplacian(gx, LaplacianKind::combinatorial),
                                   dense_laplacian(gy, LaplacianKind::combinatorial), 5,
                                   pencil_regularizer(gy));
  const SpectralEmbedding base = make_embedding(oracle.zetas, oracle.vectors);
  Eigen::MatrixXd flipped = oracle.vectors;
  flipped.col(1) = -flipped.col(1);
  flipped.col(3) = -flipped.col(3);
  const SpectralEmbedding alt = make_embedding(oracle.zetas, flipped);

  const EdgeScoreTable a = spade_scores(base, gx);
  const EdgeScoreTable b = spade_scores(alt, gx);
  for (std::size_t e = 0; e < a.scores.size(); ++e) {
    CHECK(a.scores[e] == doctest::Approx(b.scores[e]).epsilon(1e-8));
  }
}

TEST_CASE("relabeling nodes permutes scores with the edges") {
  Rng rng(149);
  const std::size_t n = 24;
  const SparseGraph gx = random_connected_graph(rng, n, 30);
  const SparseGraph gy = random_connected_graph(rng, n, 18);

  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(perm[i], perm[rng.below(i + 1)]);
  }
  auto permute = [&](const SparseGraph& g) {
    auto edges = g.canonical_edges();
    for (auto& e : edges) {
      NodeId a = perm[e.p];
      NodeId b = perm[e.q];
      e.p = std::min(a, b);
      e.q = std::max(a, b);
    }
    return SparseGraph::from_edges(n, edges);
  };
  const SparseGraph gx_perm = permute(gx);
  const SparseGraph gy_perm = permute(gy);

  const double eps = pencil_regularizer(gy);
  const std::size_t s = 5;
  const auto base = dense_generalized_eig_oracle(
      dense_laplacian(gx, LaplacianKind::combinatorial),
      dense_laplacian(gy, LaplacianKind::combinatorial), s, eps);
  const auto permuted = dense_generalized_eig_oracle(
      dense_laplacian(gx_perm, LaplacianKind::combinatorial),
      dense_laplacian(gy_perm, LaplacianKind::combinatorial), s, eps);

  const EdgeScoreTable table_base = spade_scores(make_embedding(base.zetas, base.vectors), gx);
  const EdgeScoreTable table_perm =
      spade_scores(make_embedding(permuted.zetas, permuted.vectors), gx_perm);

  // Compare edge-by-edge through the relabeling.
  for (std::size_t e = 0; e < table_base.edges.size(); ++e) {
    const auto [p, q] = table_base.edges[e];
    const NodeId a = std::min(perm[p], perm[q]);
    const NodeId b = std::max(perm[p], perm[q]);
    const auto it = std::find(table_perm.edges.begin(), table_perm.edges.end(), EdgePair{a, b});
    REQUIRE(it != table_perm.edges.end());
    const auto idx = static_cast<std::size_t>(it - table_perm.edges.begin());
    CHECK(table_base.scores[e] == doctest::Approx(table_perm.scores[idx]).epsilon(1e-6));
  }
}

TEST_CASE("score tables round-trip through the text format") {
  Rng rng(151);
  const SparseGraph gx = random_connected_graph(rng, 20, 25);
  Eigen::MatrixXd vectors(20, 3);
  for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) vectors(i, j) = rng.uniform(-1.0, 1.0);
  }
  Eigen::VectorXd zetas(3);
  zetas << 3.0, 2.0, 0.5;
  const EdgeScoreTable table = spade_scores(make_embedding(zetas, vectors), gx);

  const auto dir = testing::temp_dir("score_roundtrip");
  save_scores(table, dir / "scores.txt");
  const EdgeScoreTable loaded = load_scores(dir / "scores.txt");
  CHECK(loaded.edges == table.edges);
  CHECK(loaded.scores == table.scores);
  CHECK(loaded.ranking == table.ranking);
}
