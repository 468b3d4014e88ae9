#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "helpers.hpp"
#include "rbfpu/errors.hpp"
#include "rbfpu/geometry.hpp"

using namespace rbfpu;

namespace {

Point pt(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

std::vector<Index> scan_ellipsoid(const PointMatrix& pts, const Ellipsoid& ell) {
  std::vector<Index> out;
  for (Index i = 0; i < pts.rows(); ++i) {
    double r2 = 0.0;
    for (Index m = 0; m < pts.cols(); ++m) {
      const double d = (pts(i, m) - ell.center[m]) / ell.semi_axes[m];
      r2 += d * d;
    }
    if (r2 <= 1.0) out.push_back(i);
  }
  return out;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("ellipsoid membership is inclusive") {
  const Ellipsoid ell{pt(0.5, 0.5), pt(0.2, 0.1)};
  CHECK(contains(ell, pt(0.5, 0.5)));
  CHECK(contains(ell, pt(0.7, 0.5)));
  CHECK(contains(ell, pt(0.5, 0.4)));
  CHECK_FALSE(contains(ell, pt(0.5, 0.61)));
  CHECK_FALSE(contains(ell, pt(0.71, 0.5)));
  CHECK_THROWS_AS(contains(ell, Point::Zero(3)), UsageError);
}

TEST_CASE("ellipsoid validation") {
  CHECK_THROWS_AS((Ellipsoid{pt(0, 0), pt(0.0, 1.0)}).validate(), UsageError);
  CHECK_THROWS_AS((Ellipsoid{pt(0, 0), pt(-1.0, 1.0)}).validate(), UsageError);
  CHECK_THROWS_AS((Ellipsoid{pt(0, 0), Point::Ones(3)}).validate(), UsageError);
  CHECK_NOTHROW((Ellipsoid{pt(0, 0), pt(1.0, 2.0)}).validate());
}

TEST_CASE("box domain") {
  const BoxDomain unit = BoxDomain::unit(2);
  CHECK(unit.volume() == doctest::Approx(1.0));
  CHECK(unit.contains(pt(0, 1)));
  CHECK_FALSE(unit.contains(pt(-1e-12, 0.5)));
  CHECK_THROWS_AS((BoxDomain{pt(0, 0), pt(1, 0)}).validate(), UsageError);
}

TEST_CASE("spatial index matches a brute-force scan") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const Index dim = 1 + trial % 3;
    const Index n = 1 + static_cast<Index>(rng() % 400);
    const PointMatrix pts = test::random_points(rng, n, dim);
    const SpatialIndex index(pts);
    for (int q = 0; q < 20; ++q) {
      Ellipsoid ell{test::random_points(rng, 1, dim, -0.2, 1.2).row(0), Point(dim)};
      for (Index m = 0; m < dim; ++m) ell.semi_axes[m] = test::uniform(rng, 0.01, 0.6);
      CHECK(points_in_ellipsoid(index, ell) == scan_ellipsoid(pts, ell));
    }
  }
}

TEST_CASE("spatial index with an explicit cell size") {
  std::mt19937_64 rng(3);
  const PointMatrix pts = test::random_points(rng, 300, 2);
  const Ellipsoid ell{pt(0.3, 0.6), pt(0.25, 0.05)};
  for (double h : {1e-3, 0.05, 0.5, 4.0}) CHECK(points_in_ellipsoid(SpatialIndex(pts, h), ell) == scan_ellipsoid(pts, ell));
}

TEST_CASE("box query returns ascending indices of points in the closed box") {
  PointMatrix pts(4, 2);
  pts << 0.1, 0.1, 0.5, 0.5, 0.9, 0.9, 0.5, 0.2;
  const SpatialIndex index(pts);
  std::vector<Index> out;
  index.points_in_box(pt(0.5, 0.2), pt(1.0, 1.0), out);
  CHECK(out == std::vector<Index>{1, 2, 3});
}

TEST_CASE("patch centers sit at cell midpoints") {
  const PointMatrix c = patch_center_grid(BoxDomain::unit(2), 2);
  REQUIRE(c.rows() == 4);
  CHECK(c(0, 0) == 0.25);
  CHECK(c(0, 1) == 0.25);
  CHECK(c(1, 0) == 0.25);
  CHECK(c(1, 1) == 0.75);
  CHECK(c(2, 0) == 0.75);
  CHECK(c(3, 1) == 0.75);

  const BoxDomain dom{pt(-1, 2), pt(3, 4)};
  for (Index t = 2; t <= 9; ++t) {
    const PointMatrix g = patch_center_grid(dom, t);
    CHECK(g.rows() == t * t);
    for (Index i = 0; i < g.rows(); ++i) {
      CHECK(g(i, 0) > -1.0);
      CHECK(g(i, 0) < 3.0);
      CHECK(g(i, 1) > 2.0);
      CHECK(g(i, 1) < 4.0);
    }
  }
  CHECK_THROWS_AS(patch_center_grid(dom, 1), UsageError);
}

TEST_CASE("fill distance against brute force") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const PointMatrix pts = test::random_points(rng, 50 + trial * 30, 2);
    const PointMatrix probes = test::random_points(rng, 200, 2);
    double expected = 0.0;
    for (Index p = 0; p < probes.rows(); ++p) {
      double best = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < pts.rows(); ++i) best = std::min(best, (pts.row(i) - probes.row(p)).norm());
      expected = std::max(expected, best);
    }
    CHECK(fill_distance(pts, probes) == doctest::Approx(expected).epsilon(1e-14));
  }
}

}
