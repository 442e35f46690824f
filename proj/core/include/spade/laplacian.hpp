#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "spade/graph.hpp"

namespace spade {

enum class LaplacianKind {
  combinatorial,  ///< L = D - A
  normalized      ///< L = D^{-1/2} (D - A) D^{-1/2}
};

/// Matrix-free Laplacian with optional diagonal regularization eps (applied
/// as +eps*I). References the graph it was built from; the graph must
/// outlive the operator. Immutable and safe to share across threads.
class LaplacianOperator {
 public:
  LaplacianOperator(const SparseGraph& g, LaplacianKind kind, double eps = 0.0);

  std::size_t size() const { return graph_->num_nodes(); }
  LaplacianKind kind() const { return kind_; }
  double eps() const { return eps_; }
  const SparseGraph& graph() const { return *graph_; }

  /// y = (L + eps*I) x, one CSR row sweep, no dense materialization.
  void matvec(std::span<const double> x, std::span<double> y) const;
  Eigen::VectorXd matvec(const Eigen::VectorXd& x) const;

  /// x' (L + eps*I) x, accumulated edge-wise:
  /// sum_(p,q) w(p,q) (x_p - x_q)^2 + eps * |x|^2 for the combinatorial kind.
  double quadratic_form(std::span<const double> x) const;
  double quadratic_form(const Eigen::VectorXd& x) const;

  /// diag(L) + eps.
  std::vector<double> diagonal() const;

  /// Orthonormal basis of the operator's structural null space, one vector
  /// per connected component (constant on the component for the
  /// combinatorial kind, degree-weighted for the normalized kind). The eps
  /// term is ignored here: these are the directions the eigensolver deflates.
  std::vector<Eigen::VectorXd> null_basis() const;

 private:
  const SparseGraph* graph_;
  LaplacianKind kind_;
  double eps_;
  std::vector<double> degree_;
  std::vector<double> inv_sqrt_degree_;  // zero rows for isolated nodes
};

/// Regularizer used for the manifold-side Laplacian in the scoring pipeline:
/// 1e-6 times the mean diagonal of L.
double pencil_regularizer(const SparseGraph& g);

}  // namespace spade
