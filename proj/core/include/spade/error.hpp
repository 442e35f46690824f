#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spade {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid input data, configuration, or contract violation. CLI exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Vector/matrix shape mismatch.
class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Filesystem failure (missing file, unwritable path, malformed stream).
class IoError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or other numeric breakdown. CLI exit code 2.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Iterative method failed to converge; carries the residual history.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, std::vector<double> residual_history)
      : NumericError(what), residual_history_(std::move(residual_history)) {}

  const std::vector<double>& residual_history() const { return residual_history_; }

 private:
  std::vector<double> residual_history_;
};

}  // namespace spade
