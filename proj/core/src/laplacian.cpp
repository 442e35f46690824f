#include "spade/laplacian.hpp"

#include <cmath>

#include <fmt/format.h>

#include "spade/error.hpp"

namespace spade {

LaplacianOperator::LaplacianOperator(const SparseGraph& g, LaplacianKind kind, double eps)
    : graph_(&g), kind_(kind), eps_(eps) {
  if (eps < 0.0) {
    throw ValidationError(fmt::format("regularization must be nonnegative, got {}", eps));
  }
  const std::size_t n = g.num_nodes();
  degree_.resize(n);
  for (NodeId p = 0; p < n; ++p) degree_[p] = g.weighted_degree(p);
  if (kind_ == LaplacianKind::normalized) {
    inv_sqrt_degree_.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
      inv_sqrt_degree_[p] = degree_[p] > 0.0 ? 1.0 / std::sqrt(degree_[p]) : 0.0;
    }
  }
}

void LaplacianOperator::matvec(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = size();
  if (x.size() != n || y.size() != n) {
    throw DimensionError(
        fmt::format("matvec expects vectors of length {}, got {} and {}", n, x.size(), y.size()));
  }
  const auto offsets = graph_->row_offsets();
  const auto cols = graph_->column_indices();
  const auto weights = graph_->weights();
  if (kind_ == LaplacianKind::combinatorial) {
    for (std::size_t p = 0; p < n; ++p) {
      double acc = 0.0;
      for (std::size_t i = offsets[p]; i < offsets[p + 1]; ++i) {
        acc += weights[i] * x[cols[i]];
      }
      y[p] = (degree_[p] + eps_) * x[p] - acc;
    }
  } else {
    for (std::size_t p = 0; p < n; ++p) {
      double acc = 0.0;
      for (std::size_t i = offsets[p]; i < offsets[p + 1]; ++i) {
        acc += weights[i] * inv_sqrt_degree_[cols[i]] * x[cols[i]];
      }
      const double diag = degree_[p] > 0.0 ? 1.0 : 0.0;
      y[p] = (diag + eps_) * x[p] - inv_sqrt_degree_[p] * acc;
    }
  }
}

Eigen::VectorXd LaplacianOperator::matvec(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(x.size());
  matvec(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
         std::span<double>(y.data(), static_cast<std::size_t>(y.size())));
  return y;
}

double LaplacianOperator::quadratic_form(std::span<const double> x) const {
  const std::size_t n = size();
  if (x.size() != n) {
    throw DimensionError(fmt::format("quadratic form expects length {}, got {}", n, x.size()));
  }
  const auto offsets = graph_->row_offsets();
  const auto cols = graph_->column_indices();
  const auto weights = graph_->weights();
  double sum = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const double xp =
        kind_ == LaplacianKind::combinatorial ? x[p] : x[p] * inv_sqrt_degree_[p];
    for (std::size_t i = offsets[p]; i < offsets[p + 1]; ++i) {
      const NodeId q = cols[i];
      if (q <= p) continue;  // each undirected edge once
      const double xq =
          kind_ == LaplacianKind::combinatorial ? x[q] : x[q] * inv_sqrt_degree_[q];
      const double diff = xp - xq;
      sum += weights[i] * diff * diff;
    }
  }
  if (eps_ > 0.0) {
    double norm2 = 0.0;
    for (std::size_t p = 0; p < n; ++p) norm2 += x[p] * x[p];
    sum += eps_ * norm2;
  }
  return sum;
}

double LaplacianOperator::quadratic_form(const Eigen::VectorXd& x) const {
  return quadratic_form(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

std::vector<double> LaplacianOperator::diagonal() const {
  const std::size_t n = size();
  std::vector<double> d(n);
  for (std::size_t p = 0; p < n; ++p) {
    if (kind_ == LaplacianKind::combinatorial) {
      d[p] = degree_[p] + eps_;
    } else {
      d[p] = (degree_[p] > 0.0 ? 1.0 : 0.0) + eps_;
    }
  }
  return d;
}

std::vector<Eigen::VectorXd> LaplacianOperator::null_basis() const {
  const std::size_t n = size();
  const ComponentLabels comps = connected_components(*graph_);
  std::vector<Eigen::VectorXd> basis(comps.count, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)));
  for (std::size_t p = 0; p < n; ++p) {
    const double entry =
        kind_ == LaplacianKind::combinatorial ? 1.0 : std::sqrt(degree_[p]);
    basis[comps.label[p]][static_cast<Eigen::Index>(p)] = entry;
  }
  for (std::size_t c = 0; c < comps.count; ++c) {
    const double norm = basis[c].norm();
    if (norm > 0.0) {
      basis[c] /= norm;
    } else {
      // Isolated node under the normalized kind: its coordinate axis.
      for (std::size_t p = 0; p < n; ++p) {
        if (comps.label[p] == c) {
          basis[c][static_cast<Eigen::Index>(p)] = 1.0;
          break;
        }
      }
    }
  }
  return basis;
}

double pencil_regularizer(const SparseGraph& g) {
  if (g.num_nodes() == 0) return 0.0;
  double sum = 0.0;
  for (NodeId p = 0; p < g.num_nodes(); ++p) sum += g.weighted_degree(p);
  return 1e-6 * (sum / static_cast<double>(g.num_nodes()));
}

}  // namespace spade
