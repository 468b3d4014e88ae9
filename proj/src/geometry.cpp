#include "rbfpu/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rbfpu/errors.hpp"

namespace rbfpu {

BoxDomain BoxDomain::unit(Index dim) {
  return BoxDomain{Point::Zero(dim), Point::Ones(dim)};
}

bool BoxDomain::contains(PointRef x) const {
  return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

void BoxDomain::validate() const {
  if (lower.size() == 0 || lower.size() != upper.size())
    throw UsageError("box domain: lower and upper must have equal, nonzero length");
  if (!lower.allFinite() || !upper.allFinite())
    throw UsageError("box domain: bounds must be finite");
  if ((upper.array() <= lower.array()).any())
    throw UsageError("box domain: upper must exceed lower on every axis");
}

void Ellipsoid::validate() const {
  if (center.size() == 0 || center.size() != semi_axes.size())
    throw UsageError("ellipsoid: center and semi-axes must have equal, nonzero length");
  if (!center.allFinite() || !semi_axes.allFinite() || (semi_axes.array() <= 0.0).any())
    throw UsageError("ellipsoid: semi-axes must be positive and finite");
}

bool contains(const Ellipsoid& ell, PointRef x) {
  if (x.size() != ell.dim())
    throw UsageError("contains: point has dimension " + std::to_string(x.size()) +
                     ", ellipsoid has " + std::to_string(ell.dim()));
  return scaled_radius_sq(ell, x) <= 1.0;
}

namespace {

double mean_spacing(const PointMatrix& points, const Point& extent) {
  const auto n = static_cast<double>(std::max<Index>(points.rows(), 1));
  const auto dim = static_cast<double>(points.cols());
  const double longest = extent.maxCoeff();
  if (!(longest > 0.0)) return 1.0;
  // Flat axes would make the volume vanish; give them the longest extent's share.
  Point safe = extent;
  for (Index m = 0; m < safe.size(); ++m)
    if (!(safe[m] > 0.0)) safe[m] = longest;
  return std::pow(safe.prod() / n, 1.0 / dim);
}

}  // namespace

SpatialIndex::SpatialIndex(PointMatrix points)
    : SpatialIndex(points, [&] {
        if (points.rows() == 0) return 1.0;
        const Point extent = points.colwise().maxCoeff() - points.colwise().minCoeff();
        return mean_spacing(points, extent);
      }()) {}

SpatialIndex::SpatialIndex(PointMatrix points, double cell_size)
    : points_(std::move(points)), cell_size_(cell_size) {
  if (!(cell_size_ > 0.0) || !std::isfinite(cell_size_))
    throw UsageError("spatial index: cell size must be positive");
  if (!points_.allFinite()) throw UsageError("spatial index: points must be finite");

  const Index n = points_.rows();
  const Index dim = points_.cols();
  if (dim == 0) throw UsageError("spatial index: points must have dimension >= 1");

  Point hi;
  if (n > 0) {
    origin_ = points_.colwise().minCoeff();
    hi = points_.colwise().maxCoeff();
  } else {
    origin_ = Point::Zero(dim);
    hi = Point::Zero(dim);
  }

  // Keep the bucket count within a small multiple of N.
  const double max_cells = 4.0 * static_cast<double>(n) + 16.0;
  for (;;) {
    double total = 1.0;
    cells_per_axis_.assign(static_cast<std::size_t>(dim), 1);
    for (Index m = 0; m < dim; ++m) {
      const auto c = static_cast<Index>(std::floor((hi[m] - origin_[m]) / cell_size_)) + 1;
      cells_per_axis_[static_cast<std::size_t>(m)] = c;
      total *= static_cast<double>(c);
    }
    if (total <= max_cells) break;
    cell_size_ *= 1.5;
  }

  Index total = 1;
  for (Index c : cells_per_axis_) total *= c;

  std::vector<Index> cell_of(static_cast<std::size_t>(n));
  cell_start_.assign(static_cast<std::size_t>(total) + 1, 0);
  for (Index i = 0; i < n; ++i) {
    Index flat = 0;
    for (Index m = 0; m < dim; ++m)
      flat = flat * cells_per_axis_[static_cast<std::size_t>(m)] + cell_coord(points_(i, m), m);
    cell_of[static_cast<std::size_t>(i)] = flat;
    ++cell_start_[static_cast<std::size_t>(flat) + 1];
  }
  for (std::size_t c = 1; c < cell_start_.size(); ++c) cell_start_[c] += cell_start_[c - 1];

  // Counting sort keeps indices ascending inside each bucket.
  items_.resize(static_cast<std::size_t>(n));
  std::vector<Index> fill(cell_start_.begin(), cell_start_.end() - 1);
  for (Index i = 0; i < n; ++i)
    items_[static_cast<std::size_t>(fill[static_cast<std::size_t>(cell_of[static_cast<std::size_t>(i)])]++)] = i;
}

Index SpatialIndex::cell_coord(double value, Index axis) const {
  const double rel = (value - origin_[axis]) / cell_size_;
  const Index last = cells_per_axis_[static_cast<std::size_t>(axis)] - 1;
  if (!(rel > 0.0)) return 0;
  if (rel >= static_cast<double>(last)) return last;
  return std::min(static_cast<Index>(rel), last);
}

template <class Accept>
void SpatialIndex::query(PointRef lo, PointRef hi, Accept&& accept, std::vector<Index>& out) const {
  out.clear();
  const Index dim = this->dim();
  if (lo.size() != dim || hi.size() != dim)
    throw UsageError("spatial index: query dimension mismatch");
  if (size() == 0) return;

  std::vector<Index> first(static_cast<std::size_t>(dim)), last(static_cast<std::size_t>(dim));
  for (Index m = 0; m < dim; ++m) {
    // Boxes entirely outside the indexed range cannot contain any point.
    const double top = origin_[m] + cell_size_ * static_cast<double>(cells_per_axis_[static_cast<std::size_t>(m)]);
    if (hi[m] < origin_[m] || lo[m] > top) return;
    first[static_cast<std::size_t>(m)] = cell_coord(lo[m], m);
    last[static_cast<std::size_t>(m)] = cell_coord(hi[m], m);
  }

  std::vector<Index> cur = first;
  for (;;) {
    Index flat = 0;
    for (Index m = 0; m < dim; ++m)
      flat = flat * cells_per_axis_[static_cast<std::size_t>(m)] + cur[static_cast<std::size_t>(m)];
    const auto begin = cell_start_[static_cast<std::size_t>(flat)];
    const auto end = cell_start_[static_cast<std::size_t>(flat) + 1];
    for (Index k = begin; k < end; ++k) {
      const Index i = items_[static_cast<std::size_t>(k)];
      if (accept(points_.row(i))) out.push_back(i);
    }
    Index m = dim - 1;
    while (m >= 0) {
      auto& c = cur[static_cast<std::size_t>(m)];
      if (c < last[static_cast<std::size_t>(m)]) {
        ++c;
        break;
      }
      c = first[static_cast<std::size_t>(m)];
      --m;
    }
    if (m < 0) break;
  }
  std::sort(out.begin(), out.end());
}

void SpatialIndex::points_in_box(PointRef lo, PointRef hi, std::vector<Index>& out) const {
  query(
      lo, hi,
      [&](const auto& x) { return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all(); },
      out);
}

void SpatialIndex::points_in_ellipsoid(const Ellipsoid& ell, std::vector<Index>& out) const {
  if (ell.dim() != dim()) throw UsageError("points_in_ellipsoid: dimension mismatch");
  const Point lo = ell.center - ell.semi_axes;
  const Point hi = ell.center + ell.semi_axes;
  query(lo, hi, [&](const auto& x) { return scaled_radius_sq(ell, x) <= 1.0; }, out);
}

std::vector<Index> points_in_ellipsoid(const SpatialIndex& index, const Ellipsoid& ell) {
  std::vector<Index> out;
  index.points_in_ellipsoid(ell, out);
  return out;
}

PointMatrix patch_center_grid(const BoxDomain& domain, Index t) {
  domain.validate();
  if (t < 2) throw UsageError("patch_center_grid: t must be >= 2, got " + std::to_string(t));
  const Index dim = domain.dim();
  Index count = 1;
  for (Index m = 0; m < dim; ++m) count *= t;

  const Point h = domain.extent() / static_cast<double>(t);
  PointMatrix centers(count, dim);
  for (Index row = 0; row < count; ++row) {
    Index rest = row;
    for (Index m = dim - 1; m >= 0; --m) {
      const Index k = rest % t;
      rest /= t;
      centers(row, m) = domain.lower[m] + (static_cast<double>(k) + 0.5) * h[m];
    }
  }
  return centers;
}

double fill_distance(const PointMatrix& points, const PointMatrix& probes) {
  if (points.rows() == 0 || probes.rows() == 0)
    throw UsageError("fill_distance: point and probe sets must be nonempty");
  if (points.cols() != probes.cols()) throw UsageError("fill_distance: dimension mismatch");

  const SpatialIndex index(points);
  std::vector<Index> candidates;
  double worst = 0.0;
  for (Index p = 0; p < probes.rows(); ++p) {
    const Point probe = probes.row(p);
    // Any point within distance r lies in the box of half-width r, so the
    // first box holding a point at distance <= r yields the exact nearest.
    for (double r = index.cell_size();; r *= 2.0) {
      const Point lo = probe.array() - r;
      const Point hi = probe.array() + r;
      index.points_in_box(lo, hi, candidates);
      double best = std::numeric_limits<double>::infinity();
      for (Index i : candidates) best = std::min(best, (points.row(i) - probe).norm());
      if (best <= r) {
        worst = std::max(worst, best);
        break;
      }
    }
  }
  return worst;
}

}  // namespace rbfpu
