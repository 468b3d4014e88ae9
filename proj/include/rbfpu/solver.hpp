#pragma once

#include <Eigen/Core>

namespace rbfpu {

/// Cholesky factorization A = L L^T of a symmetric positive definite matrix.
///
/// A pivot no larger than n * machine_epsilon * max_i A_ii is treated as
/// non-positive, so near-coincident nodes surface as NotNumericallyPD instead
/// of producing meaningless coefficients.
class SpdFactorization {
 public:
  /// Throws NotNumericallyPD on pivot failure, UsageError on a non-square or
  /// non-finite input.
  static SpdFactorization factorize(const Eigen::MatrixXd& a);

  Eigen::Index size() const { return lower_.rows(); }
  const Eigen::MatrixXd& lower() const { return lower_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  /// Diagonal of A^{-1}, from the squared column norms of L^{-1}.
  Eigen::VectorXd inverse_diagonal() const;

  /// lambda_min / lambda_max of A from a symmetric eigensolve.
  double rcond() const;

 private:
  SpdFactorization(Eigen::MatrixXd matrix, Eigen::MatrixXd lower)
      : matrix_(std::move(matrix)), lower_(std::move(lower)) {}

  Eigen::MatrixXd matrix_;
  Eigen::MatrixXd lower_;
};

/// Reciprocal 2-norm condition number of a symmetric matrix, in (0, 1].
/// Returns the smallest positive double when lambda_min <= 0.
double symmetric_rcond(const Eigen::MatrixXd& a);

}  // namespace rbfpu
