#pragma once

#include <vector>

#include <Eigen/Core>

#include "rbfpu/geometry.hpp"
#include "rbfpu/kernels.hpp"
#include "rbfpu/solver.hpp"

namespace rbfpu {

/// Rippa's closed-form leave-one-out residuals alpha_i / (A^{-1})_ii.
Eigen::VectorXd rippa_residuals(const SpdFactorization& fact, const Eigen::VectorXd& f);

/// 2-norm of the Rippa residual vector. NotNumericallyPD propagates.
double rippa_loocv(const Eigen::MatrixXd& a, const Eigen::VectorXd& f);
double rippa_loocv(const SpdFactorization& fact, const Eigen::VectorXd& f);

/// Reference leave-one-out error by N explicit refits on N - 1 nodes.
double brute_force_loocv(const PointMatrix& points, const Eigen::VectorXd& values,
                         KernelFamily family, const AnisotropicScale& scale);

/// q disjoint validation folds covering {0, ..., n-1}.
class CvPartition {
 public:
  /// Throws UsageError unless the folds are nonempty, pairwise disjoint and
  /// cover exactly {0, ..., n-1}.
  CvPartition(std::vector<std::vector<Index>> folds, Index n);

  static CvPartition leave_one_out(Index n);

  Index size() const { return n_; }
  const std::vector<std::vector<Index>>& folds() const { return folds_; }

 private:
  std::vector<std::vector<Index>> folds_;
  Index n_;
};

/// Norm of all fold residuals f^v - A^{vt} (A^{tt})^{-1} f^t, with the blocks
/// sliced out of a single kernel matrix. Each fold's training set is every
/// node outside that fold.
double qfold_cv(const PointMatrix& points, const Eigen::VectorXd& values, KernelFamily family,
                const AnisotropicScale& scale, const CvPartition& part);

}  // namespace rbfpu
