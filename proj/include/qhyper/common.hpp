#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace qhyper {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// Bad caller input: out-of-range index, invalid exponent, malformed word.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An internal consistency check failed. Indicates a construction bug, never
/// bad input; callers should not try to recover.
class ConstructionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

inline void ensure(bool condition, const std::string& message) {
  if (!condition) throw ConstructionError(message);
}

/// Two sides of an identity that should agree.
struct Comparison {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual() const { return lhs > rhs ? lhs - rhs : rhs - lhs; }
  /// Residual divided by max(1, |lhs|, |rhs|).
  double relative() const {
    double scale = 1.0;
    if (lhs > scale) scale = lhs;
    if (-lhs > scale) scale = -lhs;
    if (rhs > scale) scale = rhs;
    if (-rhs > scale) scale = -rhs;
    return residual() / scale;
  }
};

/// Largest number of gaussian indices the dense baby Fock model accepts.
inline constexpr int kMaxIndices = 6;

}  // namespace qhyper
