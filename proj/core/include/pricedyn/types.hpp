#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace pricedyn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Caller supplied inconsistent or out-of-range input (dimension mismatch,
/// missing warm-up state, unsupported model for an analysis, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation produced or consumed a non-finite value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Index of the first non-finite component, or -1 if all are finite.
inline Eigen::Index first_non_finite(const Vector& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) return i;
  }
  return -1;
}

}  // namespace pricedyn
