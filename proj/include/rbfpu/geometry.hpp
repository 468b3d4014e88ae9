#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace rbfpu {

using Index = Eigen::Index;

/// A single point of R^M.
using Point = Eigen::RowVectorXd;
using PointRef = Eigen::Ref<const Eigen::RowVectorXd>;

/// A set of points, one point per row (N x M, row-major so rows are contiguous).
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Axis-aligned box [lower, upper].
struct BoxDomain {
  Point lower;
  Point upper;

  static BoxDomain unit(Index dim);

  Index dim() const { return lower.size(); }
  Point extent() const { return upper - lower; }
  double volume() const { return extent().prod(); }
  bool contains(PointRef x) const;

  /// Throws UsageError unless upper[m] > lower[m] for all m.
  void validate() const;
};

/// Axis-aligned ellipsoid {x : sum_m ((x_m - c_m) / delta_m)^2 <= 1}.
struct Ellipsoid {
  Point center;
  Point semi_axes;

  Index dim() const { return center.size(); }
  void validate() const;
};

/// Boundary-inclusive membership test. Throws UsageError on dimension mismatch.
bool contains(const Ellipsoid& ell, PointRef x);

/// Squared scaled radius sum_m ((x_m - c_m) / delta_m)^2; no checks.
inline double scaled_radius_sq(const Ellipsoid& ell, PointRef x) {
  return ((x - ell.center).cwiseQuotient(ell.semi_axes)).squaredNorm();
}

/// Uniform bucket grid over a set of points.
///
/// Queries first gather candidates from every cell overlapping the query's
/// axis-aligned bounding box and then filter them exactly, so results are
/// identical to a linear scan. Immutable after construction.
class SpatialIndex {
 public:
  /// Cell size is the mean-spacing estimate (volume / N)^(1/M) of the points'
  /// bounding box.
  explicit SpatialIndex(PointMatrix points);
  SpatialIndex(PointMatrix points, double cell_size);

  const PointMatrix& points() const { return points_; }
  Index size() const { return points_.rows(); }
  Index dim() const { return points_.cols(); }
  double cell_size() const { return cell_size_; }
  Index cell_count() const { return static_cast<Index>(cell_start_.size()) - 1; }

  /// Indices of points inside the closed box [lo, hi], ascending.
  void points_in_box(PointRef lo, PointRef hi, std::vector<Index>& out) const;

  /// Indices i with contains(ell, x_i), ascending. `out` is overwritten.
  void points_in_ellipsoid(const Ellipsoid& ell, std::vector<Index>& out) const;

 private:
  template <class Accept>
  void query(PointRef lo, PointRef hi, Accept&& accept, std::vector<Index>& out) const;
  Index cell_coord(double value, Index axis) const;

  PointMatrix points_;
  Point origin_;
  double cell_size_ = 0.0;
  std::vector<Index> cells_per_axis_;
  std::vector<Index> cell_start_;
  std::vector<Index> items_;
};

std::vector<Index> points_in_ellipsoid(const SpatialIndex& index, const Ellipsoid& ell);

/// t^M cell-midpoint centers, first coordinate varying slowest. Requires t >= 2.
PointMatrix patch_center_grid(const BoxDomain& domain, Index t);

/// Max over probes of the distance to the nearest point.
double fill_distance(const PointMatrix& points, const PointMatrix& probes);

}  // namespace rbfpu
