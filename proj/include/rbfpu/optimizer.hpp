#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

namespace rbfpu {

struct NmOptions {
  /// 0 selects the default of 200 * n for an n-dimensional problem.
  int max_iterations = 0;
  double x_tolerance = 1e-3;
  double f_tolerance = 1e-6;
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  /// Relative displacement of each coordinate in the initial simplex.
  double initial_step = 0.05;
  /// Value assigned to out-of-bounds candidates before the squared violation is
  /// added. Must exceed any penalty the objective itself returns.
  double infeasible_penalty = 1e10;

  void validate() const;
  int iteration_limit(Eigen::Index n) const { return max_iterations > 0 ? max_iterations : 200 * static_cast<int>(n); }
};

/// Per-coordinate bounds; +-infinity marks an open side.
struct BoxBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static BoxBounds unbounded(Eigen::Index n);

  Eigen::Index size() const { return lower.size(); }
  void validate() const;
  bool feasible(const Eigen::VectorXd& x) const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const;
  /// Sum of squared distances to the feasible box.
  double violation_sq(const Eigen::VectorXd& x) const;
};

struct NmResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  /// Best wrapped objective value after each iteration (entry 0 is the
  /// initial simplex).
  std::vector<double> best_trace;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Default penalty level for infeasible or non-finite candidates.
inline constexpr double kPenaltyBase = 1e10;

/// Nelder-Mead simplex minimization with bounds enforced by a graded penalty.
///
/// The initial simplex perturbs each coordinate of x0 by initial_step (5%; 0.00025 for a
/// zero coordinate). Iteration stops once every vertex is within x_tolerance of the
/// best one (max norm) and the values within f_tolerance, or at the iteration
/// limit. The result is the best point ever evaluated, clamped to the bounds.
///
/// Throws UsageError when x0 is infeasible or the objective is not finite at x0.
NmResult nelder_mead(const Objective& objective, const Eigen::VectorXd& x0,
                     const BoxBounds& bounds, const NmOptions& opts = {});

}  // namespace rbfpu
