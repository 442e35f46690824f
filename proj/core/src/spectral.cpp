#include "spade/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "spade/error.hpp"
#include "spade/rng.hpp"

namespace spade {

namespace {

/// Projector onto the complement of the deflated directions (the structural
/// null space of the L_Y graph). Basis vectors are orthonormal with
/// disjoint supports.
class Deflation {
 public:
  explicit Deflation(std::vector<Eigen::VectorXd> basis) : basis_(std::move(basis)) {}

  void apply(Eigen::Ref<Eigen::VectorXd> x) const {
    for (const auto& u : basis_) x -= u * u.dot(x);
  }

  void apply(Eigen::MatrixXd& x) const {
    for (Eigen::Index c = 0; c < x.cols(); ++c) apply(x.col(c));
  }

  std::size_t dim() const { return basis_.size(); }

 private:
  std::vector<Eigen::VectorXd> basis_;
};

Eigen::VectorXd jacobi_inverse_diagonal(const LaplacianOperator& op) {
  const std::vector<double> diag = op.diagonal();
  Eigen::VectorXd inv(static_cast<Eigen::Index>(diag.size()));
  for (std::size_t i = 0; i < diag.size(); ++i) {
    // Deflated coordinates never carry signal, so a unit entry is safe.
    inv[static_cast<Eigen::Index>(i)] = diag[i] > 0.0 ? 1.0 / diag[i] : 1.0;
  }
  return inv;
}

/// Jacobi-preconditioned CG for (L_Y + eps I) z = b restricted to the
/// deflated subspace. Returns the iteration count.
std::size_t conjugate_gradient(const LaplacianOperator& ly, const Deflation& deflation,
                               const Eigen::VectorXd& inv_diag, const Eigen::VectorXd& rhs,
                               Eigen::VectorXd& z, double rel_tol, std::size_t max_iter) {
  const auto n = rhs.size();
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    z.setZero(n);
    return 0;
  }

  Eigen::VectorXd r = rhs - ly.matvec(z);
  deflation.apply(r);
  Eigen::VectorXd d = inv_diag.cwiseProduct(r);
  double delta = r.dot(d);
  const double threshold = rel_tol * rhs_norm;

  std::vector<double> residual_history;
  Eigen::VectorXd q(n);
  std::size_t iter = 0;
  double residual_norm = r.norm();
  while (residual_norm > threshold) {
    if (iter >= max_iter) {
      throw ConvergenceError(
          fmt::format("inner CG solve exceeded {} iterations (relative residual {:.3e})",
                      max_iter, residual_norm / rhs_norm),
          residual_history);
    }
    q = ly.matvec(d);
    const double dq = d.dot(q);
    if (!(dq > 0.0)) {
      throw NumericError(fmt::format("CG curvature became nonpositive ({})", dq));
    }
    const double alpha = delta / dq;
    z += alpha * d;
    r -= alpha * q;
    deflation.apply(r);
    const Eigen::VectorXd precond = inv_diag.cwiseProduct(r);
    const double delta_new = r.dot(precond);
    d = precond + (delta_new / delta) * d;
    delta = delta_new;
    ++iter;
    residual_norm = r.norm();
    residual_history.push_back(residual_norm / rhs_norm);
  }
  return iter;
}

Eigen::MatrixXd apply_operator(const LaplacianOperator& op, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd y(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    Eigen::VectorXd col = x.col(c);
    y.col(c) = op.matvec(col);
  }
  return y;
}

/// In-place B-orthonormalization (B = regularized L_Y) by Cholesky of the
/// Gram matrix, with a rank-revealing fallback that replaces dependent
/// directions by fresh random deflated vectors.
void b_orthonormalize(const LaplacianOperator& ly, const Deflation& deflation, Eigen::MatrixXd& x,
                      Rng& rng) {
  for (int attempt = 0; attempt < 8; ++attempt) {
    const Eigen::MatrixXd bx = apply_operator(ly, x);
    Eigen::MatrixXd gram = x.transpose() * bx;
    gram = 0.5 * (gram + gram.transpose());
    const Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() == Eigen::Success) {
      llt.matrixU().solveInPlace<Eigen::OnTheRight>(x);
      return;
    }
    // Keep the independent directions, refresh the rest.
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    const double cutoff = std::max(es.eigenvalues().maxCoeff(), 0.0) * 1e-12;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      if (es.eigenvalues()[i] > cutoff && es.eigenvalues()[i] > 0.0) keep.push_back(i);
    }
    Eigen::MatrixXd fresh(x.rows(), x.cols());
    for (std::size_t j = 0; j < keep.size(); ++j) {
      fresh.col(static_cast<Eigen::Index>(j)) =
          x * es.eigenvectors().col(keep[j]) / std::sqrt(es.eigenvalues()[keep[j]]);
    }
    for (Eigen::Index j = static_cast<Eigen::Index>(keep.size()); j < x.cols(); ++j) {
      for (Eigen::Index i = 0; i < x.rows(); ++i) fresh(i, j) = rng.uniform(-1.0, 1.0);
      deflation.apply(fresh.col(j));
    }
    x = fresh;
  }
  throw NumericError("block orthonormalization failed to recover full rank");
}

void fix_sign(Eigen::MatrixXd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index at = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&at);
    if (vectors(at, c) < 0.0) vectors.col(c) = -vectors.col(c);
  }
}

}  // namespace

SpectralEmbedding make_embedding(const Eigen::VectorXd& zetas, const Eigen::MatrixXd& vectors) {
  if (zetas.size() != vectors.cols()) {
    throw DimensionError("zetas/vectors size mismatch");
  }
  SpectralEmbedding emb;
  emb.zetas = zetas;
  emb.vectors = vectors;
  emb.s = static_cast<std::size_t>(zetas.size());
  emb.vs = vectors;
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    emb.vs.col(c) *= std::sqrt(std::max(zetas[c], 0.0));
  }
  return emb;
}

SpectralEmbedding top_generalized_eigenpairs(const LaplacianOperator& lx,
                                             const LaplacianOperator& ly, std::size_t s,
                                             double tol) {
  EigsOptions options;
  options.tol = tol;
  return top_generalized_eigenpairs(lx, ly, s, options);
}

SpectralEmbedding top_generalized_eigenpairs(const LaplacianOperator& lx,
                                             const LaplacianOperator& ly, std::size_t s,
                                             const EigsOptions& options) {
  const std::size_t n = lx.size();
  if (ly.size() != n) {
    throw DimensionError(fmt::format("operator sizes differ: {} vs {}", n, ly.size()));
  }
  if (!(options.tol > 0.0)) {
    throw ValidationError("tolerance must be positive");
  }

  const Deflation deflation(ly.null_basis());
  const std::size_t usable = n - deflation.dim();
  if (s < 1 || s > usable) {
    throw ValidationError(fmt::format(
        "s={} out of range: the deflated pencil has {} usable directions", s, usable));
  }

  const std::size_t block = std::min(s + options.guard, usable);
  Rng rng(options.seed);

  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(block));
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = rng.uniform(-1.0, 1.0);
  }
  deflation.apply(x);
  b_orthonormalize(ly, deflation, x, rng);

  SolverDiagnostics diag;
  diag.seed = options.seed;

  const Eigen::VectorXd inv_diag = jacobi_inverse_diagonal(ly);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(block));
  Eigen::VectorXd theta_prev = theta;
  const std::size_t cg_cap = options.cg_iter_per_n * std::max<std::size_t>(n, 1);
  std::size_t stable = 0;

  // Ritz values settle before the vectors do; the returned pairs must also
  // honor the residual contract, floored by what the inner solves can reach.
  const double residual_tol = std::max(options.tol, 10.0 * options.cg_rel_tol);
  const auto residuals_within_tol = [&](const Eigen::MatrixXd& vectors,
                                        const Eigen::VectorXd& values) {
    const double zeta_floor = 1e-12 * std::max(std::abs(values[0]), 1e-300);
    for (std::size_t j = 0; j < s; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      if (values[jj] <= zeta_floor) continue;  // structural zero pairs
      const Eigen::VectorXd col = vectors.col(jj);
      const Eigen::VectorXd b_col = ly.matvec(col);
      Eigen::VectorXd residual = lx.matvec(col) - values[jj] * b_col;
      deflation.apply(residual);
      if (residual.norm() > residual_tol * values[jj] * b_col.norm()) return false;
    }
    return true;
  };

  for (std::size_t sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    diag.sweeps = sweep;

    // One block step of x -> B^{-1} L_X x on the deflated subspace.
    Eigen::MatrixXd y = apply_operator(lx, x);
    deflation.apply(y);
    Eigen::MatrixXd z(y.rows(), y.cols());
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
      const Eigen::VectorXd rhs = y.col(c);
      Eigen::VectorXd sol = theta[c] * x.col(c);  // warm start near the fixed point
      diag.total_cg_iterations +=
          conjugate_gradient(ly, deflation, inv_diag, rhs, sol, options.cg_rel_tol, cg_cap);
      z.col(c) = sol;
    }
    deflation.apply(z);
    b_orthonormalize(ly, deflation, z, rng);

    // Rayleigh-Ritz in the B-orthonormal block.
    Eigen::MatrixXd projected = z.transpose() * apply_operator(lx, z);
    projected = 0.5 * (projected + projected.transpose());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(projected);
    if (es.info() != Eigen::Success) {
      throw NumericError("Rayleigh-Ritz eigendecomposition failed");
    }
    Eigen::MatrixXd rotated(z.rows(), z.cols());
    for (Eigen::Index jj = 0; jj < z.cols(); ++jj) {
      const Eigen::Index src = z.cols() - 1 - jj;  // descending Ritz values
      rotated.col(jj) = z * es.eigenvectors().col(src);
      theta[jj] = es.eigenvalues()[src];
    }
    x = std::move(rotated);

    const double scale_floor = 1e-6 * std::max(std::abs(theta[0]), 1e-300);
    bool sweep_stable = true;
    for (std::size_t j = 0; j < s; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double scale = std::max(std::abs(theta[jj]), scale_floor);
      if (std::abs(theta[jj] - theta_prev[jj]) > options.tol * scale) {
        sweep_stable = false;
        break;
      }
    }
    theta_prev = theta;
    stable = sweep_stable ? stable + 1 : 0;
    if (stable >= options.stable_sweeps && residuals_within_tol(x, theta)) {
      diag.converged = true;
      break;
    }
  }

  if (!diag.converged) {
    std::vector<double> history(theta.data(), theta.data() + theta.size());
    throw ConvergenceError(
        fmt::format("eigensolver Ritz values failed to stabilize within {} sweeps",
                    options.max_sweeps),
        history);
  }

  Eigen::MatrixXd vectors = x.leftCols(static_cast<Eigen::Index>(s));
  fix_sign(vectors);
  Eigen::VectorXd zetas = theta.head(static_cast<Eigen::Index>(s)).cwiseMax(0.0);

  SpectralEmbedding emb = make_embedding(zetas, vectors);
  emb.diag = diag;
  emb.diag.residual_norms.resize(s);
  for (std::size_t j = 0; j < s; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    Eigen::VectorXd col = vectors.col(jj);
    Eigen::VectorXd residual = lx.matvec(col) - zetas[jj] * ly.matvec(col);
    deflation.apply(residual);
    emb.diag.residual_norms[j] = residual.norm();
  }
  return emb;
}

EdgeScoreTable spade_scores(const SpectralEmbedding& embedding, const SparseGraph& graph) {
  if (static_cast<std::size_t>(embedding.vs.rows()) != graph.num_nodes()) {
    throw DimensionError(fmt::format("embedding has {} rows but the graph has {} nodes",
                                     embedding.vs.rows(), graph.num_nodes()));
  }
  EdgeScoreTable table;
  table.edges = graph.canonical_pairs();
  table.scores.resize(table.edges.size());
  for (std::size_t e = 0; e < table.edges.size(); ++e) {
    const auto [p, q] = table.edges[e];
    table.scores[e] = (embedding.vs.row(p) - embedding.vs.row(q)).squaredNorm();
  }
  table.ranking.resize(table.edges.size());
  for (std::size_t i = 0; i < table.ranking.size(); ++i) table.ranking[i] = i;
  std::sort(table.ranking.begin(), table.ranking.end(), [&](std::size_t a, std::size_t b) {
    return table.scores[a] > table.scores[b] || (table.scores[a] == table.scores[b] && a < b);
  });
  return table;
}

}  // namespace spade
