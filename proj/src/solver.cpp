#include "rbfpu/solver.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "rbfpu/errors.hpp"

namespace rbfpu {

SpdFactorization SpdFactorization::factorize(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw UsageError("factorize: matrix must be square");
  if (!a.allFinite()) throw UsageError("factorize: matrix entries must be finite");
  const Eigen::Index n = a.rows();
  if (n == 0) return SpdFactorization(a, Eigen::MatrixXd(0, 0));

  const double max_diag = a.diagonal().maxCoeff();
  const double threshold =
      static_cast<double>(n) * std::numeric_limits<double>::epsilon() * std::max(max_diag, 0.0);

  Eigen::LLT<Eigen::MatrixXd> llt(a);
  Eigen::MatrixXd lower = llt.matrixL();
  // Rows before a failed pivot are final even when LLT stops early, so the
  // pivots can be recovered in order as a_kk - |L(k, 0:k)|^2.
  for (Eigen::Index k = 0; k < n; ++k) {
    const double pivot = a(k, k) - lower.row(k).head(k).squaredNorm();
    if (!(pivot > threshold) || !std::isfinite(pivot)) {
      throw NotNumericallyPD("factorize: non-positive pivot at row " + std::to_string(k), k);
    }
  }
  if (llt.info() != Eigen::Success) throw NotNumericallyPD("factorize: factorization failed", n - 1);
  return SpdFactorization(a, std::move(lower));
}

Eigen::VectorXd SpdFactorization::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != size())
    throw UsageError("solve: rhs has length " + std::to_string(rhs.size()) + ", expected " +
                     std::to_string(size()));
  Eigen::VectorXd x = lower_.triangularView<Eigen::Lower>().solve(rhs);
  lower_.triangularView<Eigen::Lower>().transpose().solveInPlace(x);
  return x;
}

Eigen::VectorXd SpdFactorization::inverse_diagonal() const {
  Eigen::MatrixXd inv_lower = Eigen::MatrixXd::Identity(size(), size());
  lower_.triangularView<Eigen::Lower>().solveInPlace(inv_lower);
  // A^{-1} = L^{-T} L^{-1}, so (A^{-1})_ii is the squared norm of column i of L^{-1}.
  return inv_lower.colwise().squaredNorm().transpose();
}

double SpdFactorization::rcond() const { return symmetric_rcond(matrix_); }

double symmetric_rcond(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) return 1.0;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  const auto& lambda = eig.eigenvalues();
  const double lo = lambda.minCoeff();
  const double hi = lambda.maxCoeff();
  if (!(hi > 0.0) || !(lo > 0.0)) return std::numeric_limits<double>::min();
  return std::min(1.0, lo / hi);
}

}  // namespace rbfpu
