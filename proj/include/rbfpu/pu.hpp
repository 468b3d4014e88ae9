#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "rbfpu/datagen.hpp"
#include "rbfpu/geometry.hpp"
#include "rbfpu/kernels.hpp"
#include "rbfpu/optimizer.hpp"

namespace rbfpu {

enum class FitMode { classic, loocv };

std::string_view to_string(FitMode mode);
FitMode parse_fit_mode(std::string_view token);

/// Lower bound on every anisotropic shape parameter during optimization.
inline constexpr double kEpsMin = 1e-3;
/// Candidates whose local matrix has rcond below this are penalized.
inline constexpr double kRcondFloor = 1e-15;
/// Candidates whose local solve leaves |A alpha - f| > kResidualLimit |f| are
/// penalized like those below kRcondFloor.
inline constexpr double kResidualLimit = 1e-10;

/// Penalty tiers above kPenaltyBase, from worst to mildest: too few nodes
/// (kCountPenalty + missing nodes), local fill distance above its bound
/// (kFillPenalty + graded excess, < kCountPenalty), numerically unstable
/// system (graded flatness, < kFillPenalty).
inline constexpr double kCountPenalty = 3e3;
inline constexpr double kFillPenalty = 2e3;

/// Instability penalty: kFlatnessWeight * (kFlatnessOffset - log10(smallest
/// scaled node separation) - log10(min(1, min_m eps_m * L))), clamped to
/// [0, kFillPenalty / 2], where L is the objective's reference length.
inline constexpr double kFlatnessWeight = 10.0;
inline constexpr double kFlatnessOffset = 20.0;

/// Nelder-Mead restarts allowed while a patch's best value is still a penalty.
inline constexpr int kPenaltyRestarts = 5;

/// Fewest nodes a patch may hold in LOOCV mode: max(M + 1, 3).
inline Index min_patch_points(Index dim) { return std::max<Index>(dim + 1, 3); }

/// One subdomain and its local interpolant.
struct PatchModel {
  Ellipsoid ellipsoid;
  AnisotropicScale scale = AnisotropicScale(Point::Ones(1));
  /// Ascending indices into the model's node set.
  std::vector<Index> node_indices;
  Eigen::VectorXd coefficients;
  double loocv_error = 0.0;
  double rcond = 1.0;
  int optimizer_iterations = 0;
  /// LOOCV error at the optimizer's starting point (LOOCV mode; NaN when
  /// that starting point was penalized, or in classic mode).
  double initial_loocv_error = 0.0;
  /// |A alpha - f| / |f| of the local solve (0 for f = 0).
  double solve_residual = 0.0;

  Index n_points() const { return static_cast<Index>(node_indices.size()); }
};

/// Semi-axis bounds: delta_star covers the domain, delta_plus caps the overlap.
struct CoveringBounds {
  double delta_star = 0.0;
  double delta_plus = 0.0;
};

/// delta* = half-diagonal of a grid cell of side (upper - lower) / t;
/// delta+ = overlap_factor * delta*. Requires t >= 2 and overlap_factor > 1.
CoveringBounds covering_bounds(const BoxDomain& domain, Index t, double overlap_factor);

/// Fitted partition-of-unity interpolant. Immutable after construction.
class PUModel {
 public:
  PUModel(BoxDomain domain, KernelFamily family, FitMode mode, CoveringBounds bounds,
          PointMatrix nodes, std::vector<PatchModel> patches);

  const BoxDomain& domain() const { return domain_; }
  KernelFamily family() const { return family_; }
  FitMode mode() const { return mode_; }
  double delta_star() const { return bounds_.delta_star; }
  double delta_plus() const { return bounds_.delta_plus; }
  const PointMatrix& nodes() const { return nodes_; }
  const std::vector<PatchModel>& patches() const { return patches_; }

  /// Indices of patches whose bounding box contains x (a superset of the
  /// patches containing x), ascending.
  void candidate_patches(PointRef x, std::vector<Index>& out) const;

 private:
  BoxDomain domain_;
  KernelFamily family_;
  FitMode mode_;
  CoveringBounds bounds_;
  PointMatrix nodes_;
  std::vector<PatchModel> patches_;
  std::shared_ptr<const SpatialIndex> center_index_;
  Point max_semi_axes_;
};

/// Fits the local interpolant of `patch` to the nodes currently listed in its
/// node_indices, filling coefficients, loocv_error, rcond and solve_residual.
/// Throws NotNumericallyPD when the local matrix is not numerically SPD.
void fit_patch(PatchModel& patch, KernelFamily family, const LabeledPointSet& data);

/// Classic partition of unity: t^M balls of radius radius_factor * delta* at
/// the cell midpoints, all with isotropic shape parameter eps.
///
/// Every patch must capture at least one node, else CoveringError.
PUModel fit_classic(const LabeledPointSet& data, const BoxDomain& domain, Index t, KernelFamily family,
                    double eps = 1.0, double radius_factor = 1.0);

struct LoocvSettings {
  NmOptions nm;
  double overlap_factor = 3.0;
  double eps_min = kEpsMin;
  /// Candidates whose local fill distance (over the patch clipped to the
  /// domain) exceeds fill_ratio times the global fill distance are penalized;
  /// <= 0 disables the check. Patches where no candidate meets the bound are
  /// refit without it.
  double fill_ratio = 1.0;
  /// Starting point: eps = initial_eps on every axis, delta = initial_delta_factor * delta*.
  double initial_eps = 1.0;
  double initial_delta_factor = 1.5;
};

/// LOOCV partition of unity: per patch, Nelder-Mead minimizes the Rippa error
/// over (eps_1..eps_M, delta_1..delta_M) with eps >= eps_min and
/// delta* <= delta <= delta+, starting from ((1,..,1), (1.5 delta*, ..)).
PUModel fit_loocv(const LabeledPointSet& data, const BoxDomain& domain, Index t, KernelFamily family,
                  const LoocvSettings& settings = {});

/// Local fill-distance requirement for one patch: the largest distance from a
/// probe of the clipped patch to its nearest captured node must not exceed
/// max_fill.
struct FillBound {
  BoxDomain domain;
  double max_fill = 0.0;
};

/// Probes for a patch's local fill distance: a 9^M grid over the bounding box
/// of `ell`, restricted to points inside both `ell` and `domain`.
PointMatrix local_fill_probes(const Ellipsoid& ell, const BoxDomain& domain);

/// Global fill distance of `points` over `domain`, measured on a
/// (4 t + 1)^M probe grid.
double global_fill_distance(const PointMatrix& points, const BoxDomain& domain, Index t);

/// Objective minimized for one patch in LOOCV mode; exposed for diagnostics
/// and tests. Parameters are (eps_1..eps_M, delta_1..delta_M).
class PatchObjective {
 public:
  /// reference_length sets the scale at which a shape parameter counts as
  /// flat (fit_loocv passes delta*).
  PatchObjective(const LabeledPointSet& data, const SpatialIndex& index, Point center, KernelFamily family,
                 std::optional<FillBound> fill = std::nullopt, double reference_length = 1.0);

  double operator()(const Eigen::VectorXd& params);

  /// Node indices captured by the last evaluated candidate.
  const std::vector<Index>& last_nodes() const { return nodes_; }

 private:
  double unstable_penalty(const Point& eps) const;
  double local_fill(const Ellipsoid& ell) const;

  const LabeledPointSet& data_;
  const SpatialIndex& index_;
  Point center_;
  KernelFamily family_;
  std::optional<FillBound> fill_;
  double reference_length_;
  std::vector<Index> nodes_;
  Eigen::MatrixXd a_;
  Eigen::VectorXd f_;
};

struct ShepardWeights {
  std::vector<Index> patches;
  std::vector<double> weights;
};

/// Normalized W2 weights of the patches supporting x; the weight of patch j is
/// phi_W2(|(x - c_j) / delta_j|), which vanishes exactly on the boundary of
/// patch j. A point lying only on patch boundaries gets equal weights over
/// those patches. Throws CoverageError when no patch contains x.
ShepardWeights shepard_weights(const PUModel& model, PointRef x);

/// Partition-of-unity interpolant at every row of eval_points.
Eigen::VectorXd evaluate(const PUModel& model, const PointMatrix& eval_points);

/// Number of patches containing each probe point.
std::vector<int> overlap_counts(const PUModel& model, const PointMatrix& probes);

/// ceil(2 delta+ / min_m h_m + 1)^M, the documented overlap bound for a
/// t-grid covering.
double overlap_bound(const BoxDomain& domain, Index t, double delta_plus);

struct PatchStats {
  double mean_points = 0.0;
  Index max_points = 0;
  Index min_points = 0;
};
PatchStats patch_stats(const PUModel& model);

}  // namespace rbfpu
