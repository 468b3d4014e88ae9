#include "rbfpu/loocv.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rbfpu/errors.hpp"

namespace rbfpu {

Eigen::VectorXd rippa_residuals(const SpdFactorization& fact, const Eigen::VectorXd& f) {
  if (f.size() != fact.size()) throw UsageError("rippa: value vector length mismatch");
  const Eigen::VectorXd alpha = fact.solve(f);
  return alpha.cwiseQuotient(fact.inverse_diagonal());
}

double rippa_loocv(const SpdFactorization& fact, const Eigen::VectorXd& f) {
  return rippa_residuals(fact, f).norm();
}

double rippa_loocv(const Eigen::MatrixXd& a, const Eigen::VectorXd& f) {
  if (f.size() != a.rows()) throw UsageError("rippa_loocv: value vector length mismatch");
  return rippa_loocv(SpdFactorization::factorize(a), f);
}

double brute_force_loocv(const PointMatrix& points, const Eigen::VectorXd& values,
                         KernelFamily family, const AnisotropicScale& scale) {
  const Index n = points.rows();
  if (n < 2) throw UsageError("brute_force_loocv: need at least 2 points");
  if (values.size() != n) throw UsageError("brute_force_loocv: value vector length mismatch");
  if (points.cols() != scale.dim()) throw UsageError("brute_force_loocv: dimension mismatch");

  Eigen::VectorXd residual(n);
  Eigen::MatrixXd a(n - 1, n - 1);
  Eigen::VectorXd f(n - 1);
  std::vector<Index> keep;
  for (Index i = 0; i < n; ++i) {
    keep.clear();
    for (Index k = 0; k < n; ++k)
      if (k != i) keep.push_back(k);
    for (Index r = 0; r < n - 1; ++r) {
      f[r] = values[keep[static_cast<std::size_t>(r)]];
      for (Index c = 0; c < n - 1; ++c)
        a(r, c) = eval_kernel(family, scale, points.row(keep[static_cast<std::size_t>(r)]),
                              points.row(keep[static_cast<std::size_t>(c)]));
    }
    const Eigen::VectorXd alpha = SpdFactorization::factorize(a).solve(f);
    double prediction = 0.0;
    for (Index k = 0; k < n - 1; ++k)
      prediction += eval_kernel(family, scale, points.row(i), points.row(keep[static_cast<std::size_t>(k)])) * alpha[k];
    residual[i] = values[i] - prediction;
  }
  return residual.norm();
}

CvPartition::CvPartition(std::vector<std::vector<Index>> folds, Index n)
    : folds_(std::move(folds)), n_(n) {
  if (n < 1) throw UsageError("cv partition: need at least one point");
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (auto& fold : folds_) {
    if (fold.empty()) throw UsageError("cv partition: empty fold");
    std::sort(fold.begin(), fold.end());
    for (Index i : fold) {
      if (i < 0 || i >= n) throw UsageError("cv partition: index " + std::to_string(i) + " out of range");
      if (seen[static_cast<std::size_t>(i)]) throw UsageError("cv partition: index " + std::to_string(i) + " in two folds");
      seen[static_cast<std::size_t>(i)] = 1;
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw UsageError("cv partition: folds do not cover every index");
}

CvPartition CvPartition::leave_one_out(Index n) {
  std::vector<std::vector<Index>> folds;
  folds.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) folds.push_back({i});
  return CvPartition(std::move(folds), n);
}

double qfold_cv(const PointMatrix& points, const Eigen::VectorXd& values, KernelFamily family,
                const AnisotropicScale& scale, const CvPartition& part) {
  const Index n = points.rows();
  if (part.size() != n || values.size() != n)
    throw UsageError("qfold_cv: partition, points and values must agree in size");

  const Eigen::MatrixXd full = kernel_matrix(family, scale, points);
  double sum_sq = 0.0;
  std::vector<char> in_fold(static_cast<std::size_t>(n));
  for (const auto& fold : part.folds()) {
    std::fill(in_fold.begin(), in_fold.end(), 0);
    for (Index i : fold) in_fold[static_cast<std::size_t>(i)] = 1;
    std::vector<Index> train;
    for (Index i = 0; i < n; ++i)
      if (!in_fold[static_cast<std::size_t>(i)]) train.push_back(i);
    if (train.empty()) throw UsageError("qfold_cv: a fold leaves no training points");

    const auto nt = static_cast<Index>(train.size());
    const auto nv = static_cast<Index>(fold.size());
    const Eigen::MatrixXd a_tt = full(train, train);
    const Eigen::MatrixXd a_vt = full(fold, train);
    Eigen::VectorXd f_t(nt), f_v(nv);
    for (Index k = 0; k < nt; ++k) f_t[k] = values[train[static_cast<std::size_t>(k)]];
    for (Index k = 0; k < nv; ++k) f_v[k] = values[fold[static_cast<std::size_t>(k)]];

    const Eigen::VectorXd alpha = SpdFactorization::factorize(a_tt).solve(f_t);
    // Accumulate in the same order as an explicit kernel sum.
    for (Index v = 0; v < nv; ++v) {
      double prediction = 0.0;
      for (Index k = 0; k < nt; ++k) prediction += a_vt(v, k) * alpha[k];
      const double r = f_v[v] - prediction;
      sum_sq += r * r;
    }
  }
  return std::sqrt(sum_sq);
}

}  // namespace rbfpu
