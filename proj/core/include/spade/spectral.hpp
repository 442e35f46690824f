#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "spade/graph.hpp"
#include "spade/laplacian.hpp"

namespace spade {

struct EigsOptions {
  double tol = 1e-6;              ///< Ritz-value stabilization tolerance
  std::size_t stable_sweeps = 3;  ///< consecutive stable sweeps required
  std::size_t max_sweeps = 500;
  std::size_t guard = 8;          ///< extra block columns beyond s
  std::uint64_t seed = 0x5eed1e5;
  double cg_rel_tol = 1e-8;
  std::size_t cg_iter_per_n = 10;  ///< inner iteration cap = cg_iter_per_n * N
};

struct SolverDiagnostics {
  std::size_t sweeps = 0;
  std::size_t total_cg_iterations = 0;
  std::vector<double> residual_norms;  ///< deflated residual per returned pair
  std::uint64_t seed = 0;
  bool converged = false;
};

/// Top-s generalized eigenpairs of the pencil (L_X, L_Y): zetas sorted
/// nonincreasing, underlying vectors L_Y-orthonormal (in the regularized
/// operator's inner product), vs columns scaled by sqrt(zeta).
struct SpectralEmbedding {
  Eigen::MatrixXd vs;       // N x s, column i is v_i * sqrt(zeta_i)
  Eigen::VectorXd zetas;    // length s, nonincreasing
  Eigen::MatrixXd vectors;  // N x s, the underlying v_i
  std::size_t s = 0;
  SolverDiagnostics diag;
};

SpectralEmbedding make_embedding(const Eigen::VectorXd& zetas, const Eigen::MatrixXd& vectors);

/// Block orthogonal iteration on x -> solve(L_Y + eps I, L_X x) with
/// Jacobi-preconditioned CG inner solves. All iterates are kept orthogonal
/// to the constant vector on each connected component of the L_Y graph (the
/// pseudoinverse realization). ly carries its own regularization eps.
/// Throws ConvergenceError when an inner solve exceeds its iteration cap or
/// the sweep cap passes without Ritz stabilization.
SpectralEmbedding top_generalized_eigenpairs(const LaplacianOperator& lx,
                                             const LaplacianOperator& ly, std::size_t s,
                                             double tol);
SpectralEmbedding top_generalized_eigenpairs(const LaplacianOperator& lx,
                                             const LaplacianOperator& ly, std::size_t s,
                                             const EigsOptions& options);

struct DenseEigResult {
  Eigen::VectorXd zetas;
  Eigen::MatrixXd vectors;
};

/// Direct-factorization oracle for the deflated, regularized pencil:
/// eigendecomposes ly to split off its null space, then solves the reduced
/// dense generalized problem. Same normalization contract as the iterative
/// solver. Guard rail: N <= 500.
DenseEigResult dense_generalized_eig_oracle(const Eigen::MatrixXd& lx_dense,
                                            const Eigen::MatrixXd& ly_dense, std::size_t s,
                                            double eps = 0.0);

/// Per-edge robustness scores over the graph's canonical edge list:
/// score(p, q) = sum_i (vs[p,i] - vs[q,i])^2, ranked nonincreasing with
/// ties broken by the lower edge index.
struct EdgeScoreTable {
  std::vector<EdgePair> edges;       // canonical order from the input graph
  std::vector<double> scores;        // aligned with edges
  std::vector<std::size_t> ranking;  // permutation, scores nonincreasing
};

EdgeScoreTable spade_scores(const SpectralEmbedding& embedding, const SparseGraph& graph);

/// Text export: header `p q score`, one canonical edge per line, scores at
/// full precision. The ranking is recomputed on load.
void save_scores(const EdgeScoreTable& table, const std::filesystem::path& path);
EdgeScoreTable load_scores(const std::filesystem::path& path);

}  // namespace spade
