#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "spade/error.hpp"
#include "spade/spectral.hpp"

namespace spade {

DenseEigResult dense_generalized_eig_oracle(const Eigen::MatrixXd& lx_dense,
                                            const Eigen::MatrixXd& ly_dense, std::size_t s,
                                            double eps) {
  constexpr Eigen::Index kGuardRail = 500;
  const Eigen::Index n = lx_dense.rows();
  if (n > kGuardRail) {
    throw ValidationError(fmt::format("dense oracle is capped at {} nodes, got {}", kGuardRail, n));
  }
  if (lx_dense.cols() != n || ly_dense.rows() != n || ly_dense.cols() != n) {
    throw DimensionError("oracle expects two square matrices of equal size");
  }
  if (eps < 0.0) {
    throw ValidationError("regularization must be nonnegative");
  }

  // Split off ly's null space; its orthogonal complement carries the pencil.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ly_eig(ly_dense);
  if (ly_eig.info() != Eigen::Success) {
    throw NumericError("dense eigendecomposition of ly failed");
  }
  const Eigen::VectorXd& lambda = ly_eig.eigenvalues();  // ascending
  const double cutoff = std::max(lambda.cwiseAbs().maxCoeff(), 1.0) * 1e-10;
  Eigen::Index null_dim = 0;
  while (null_dim < n && lambda[null_dim] <= cutoff) ++null_dim;

  const Eigen::Index usable = n - null_dim;
  if (s < 1 || static_cast<Eigen::Index>(s) > usable) {
    throw ValidationError(
        fmt::format("s={} out of range: the deflated pencil has {} usable directions", s, usable));
  }

  const Eigen::MatrixXd basis = ly_eig.eigenvectors().rightCols(usable);
  Eigen::MatrixXd reduced_lx = basis.transpose() * lx_dense * basis;
  reduced_lx = 0.5 * (reduced_lx + reduced_lx.transpose());
  Eigen::MatrixXd reduced_ly =
      (lambda.tail(usable).array() + eps).matrix().asDiagonal().toDenseMatrix();

  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> pencil(reduced_lx, reduced_ly);
  if (pencil.info() != Eigen::Success) {
    throw NumericError("dense generalized eigendecomposition failed");
  }

  DenseEigResult result;
  result.zetas.resize(static_cast<Eigen::Index>(s));
  result.vectors.resize(n, static_cast<Eigen::Index>(s));
  for (std::size_t j = 0; j < s; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const Eigen::Index src = usable - 1 - jj;  // descending
    result.zetas[jj] = pencil.eigenvalues()[src];
    result.vectors.col(jj) = basis * pencil.eigenvectors().col(src);
  }

  // Same normalization contract as the iterative solver: unit B-norm and
  // the largest-magnitude coordinate positive.
  for (Eigen::Index c = 0; c < result.vectors.cols(); ++c) {
    Eigen::Index at = 0;
    result.vectors.col(c).cwiseAbs().maxCoeff(&at);
    if (result.vectors(at, c) < 0.0) result.vectors.col(c) = -result.vectors.col(c);
  }
  return result;
}

}  // namespace spade
