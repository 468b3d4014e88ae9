#include <cmath>

#include <Eigen/Dense>

#include "doctest.h"
#include "helpers.hpp"
#include "rbfpu/errors.hpp"
#include "rbfpu/pu.hpp"

using namespace rbfpu;

namespace {

const LabeledPointSet& tracks() {
  static const LabeledPointSet data = test::franke_tracks();
  return data;
}

const PUModel& classic_model() {
  static const PUModel m = fit_classic(tracks(), BoxDomain::unit(2), 20, KernelFamily::imq);
  return m;
}

const PUModel& loocv_model() {
  static const PUModel m = fit_loocv(tracks(), BoxDomain::unit(2), 20, KernelFamily::imq);
  return m;
}

}  // namespace

TEST_SUITE("pu") {

TEST_CASE("covering bounds") {
  const auto b = covering_bounds(BoxDomain::unit(2), 20, 3.0);
  CHECK(b.delta_star == doctest::Approx(std::sqrt(2.0) / 40.0));
  CHECK(b.delta_plus == doctest::Approx(3.0 * b.delta_star));
  CHECK(b.delta_star >= std::sqrt(2.0) / 40.0);
  CHECK_THROWS_AS(covering_bounds(BoxDomain::unit(2), 20, 1.0), UsageError);
  CHECK_THROWS_AS(covering_bounds(BoxDomain::unit(2), 1, 3.0), UsageError);
}

TEST_CASE("classic fit interpolates the nodes") {
  const PUModel& m = classic_model();
  CHECK(m.patches().size() == 400);
  CHECK(m.mode() == FitMode::classic);
  const Eigen::VectorXd at_nodes = evaluate(m, tracks().points);
  CHECK((at_nodes - tracks().values).cwiseAbs().maxCoeff() <= 1e-6);
  for (const auto& p : m.patches()) {
    CHECK(p.solve_residual <= 1e-10);
    CHECK(p.ellipsoid.semi_axes[0] == m.delta_star());
    CHECK(p.scale[0] == 1.0);
  }
}

TEST_CASE("loocv fit respects the semi-axis bounds and interpolates") {
  const PUModel& m = loocv_model();
  CHECK(m.mode() == FitMode::loocv);
  for (const auto& p : m.patches()) {
    CHECK(p.n_points() >= min_patch_points(2));
    for (Index k = 0; k < 2; ++k) {
      CHECK(p.ellipsoid.semi_axes[k] >= m.delta_star());
      CHECK(p.ellipsoid.semi_axes[k] <= m.delta_plus());
      CHECK(p.scale[k] >= kEpsMin);
    }
    for (Index i : p.node_indices) CHECK(contains(p.ellipsoid, m.nodes().row(i)));
    if (std::isfinite(p.initial_loocv_error)) CHECK(p.loocv_error <= p.initial_loocv_error);
    CHECK(p.solve_residual <= 1e-10);
  }
  const Eigen::VectorXd at_nodes = evaluate(m, tracks().points);
  CHECK((at_nodes - tracks().values).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("loocv beats classic on the 1000-point track set") {
  const PointMatrix grid = eval_grid(BoxDomain::unit(2), 40);
  const Eigen::VectorXd truth = sample(TestFunction::franke, grid);
  const double e_classic = rmse(evaluate(classic_model(), grid), truth);
  const double e_loocv = rmse(evaluate(loocv_model(), grid), truth);
  CHECK(e_loocv < e_classic);
}

TEST_CASE("Shepard weights form a partition of unity") {
  std::mt19937_64 rng(31);
  const PointMatrix probes = test::random_points(rng, 500, 2);
  for (const PUModel* m : {&classic_model(), &loocv_model()}) {
    for (Index i = 0; i < probes.rows(); ++i) {
      const auto w = shepard_weights(*m, probes.row(i));
      double sum = 0.0;
      for (std::size_t k = 0; k < w.patches.size(); ++k) {
        CHECK(w.weights[k] > 0.0);
        CHECK(contains(m->patches()[w.patches[k]].ellipsoid, probes.row(i)));
        sum += w.weights[k];
      }
      CHECK(std::abs(sum - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("domain corners are covered") {
  PointMatrix corners(4, 2);
  corners << 0, 0, 0, 1, 1, 0, 1, 1;
  CHECK_NOTHROW(evaluate(classic_model(), corners));
  for (Index i = 0; i < 4; ++i) {
    const auto w = shepard_weights(classic_model(), corners.row(i));
    CHECK_FALSE(w.patches.empty());
  }
}

TEST_CASE("points outside every patch raise CoverageError") {
  Point far(2);
  far << 2.0, 2.0;
  try {
    shepard_weights(classic_model(), far);
    FAIL("expected CoverageError");
  } catch (const CoverageError& e) {
    CHECK(e.point() == std::vector<double>{2.0, 2.0});
  }
  CHECK_THROWS_AS(shepard_weights(classic_model(), Point::Zero(3)), UsageError);
}

TEST_CASE("a single patch reproduces the global interpolant") {
  std::mt19937_64 rng(13);
  LabeledPointSet data;
  data.points = test::random_points(rng, 25, 2);
  data.values = sample(TestFunction::franke, data.points);
  Point eps(2);
  eps << 2.0, 3.0;

  PatchModel patch;
  patch.ellipsoid = Ellipsoid{Point::Constant(2, 0.5), Point::Constant(2, 0.75)};
  patch.scale = AnisotropicScale(eps);
  for (Index i = 0; i < 25; ++i) patch.node_indices.push_back(i);
  fit_patch(patch, KernelFamily::m2, data);
  const PUModel m(BoxDomain::unit(2), KernelFamily::m2, FitMode::classic, {0.75, 0.75}, data.points, {patch});

  Eigen::MatrixXd a(25, 25);
  for (Index i = 0; i < 25; ++i)
    for (Index j = 0; j < 25; ++j) a(i, j) = eval_kernel(KernelFamily::m2, patch.scale, data.points.row(i), data.points.row(j));
  const Eigen::VectorXd c = a.fullPivLu().solve(data.values);

  const PointMatrix grid = eval_grid(BoxDomain::unit(2), 15);
  const Eigen::VectorXd got = evaluate(m, grid);
  for (Index g = 0; g < grid.rows(); ++g) {
    double expected = 0.0;
    for (Index i = 0; i < 25; ++i) expected += c[i] * eval_kernel(KernelFamily::m2, patch.scale, grid.row(g), data.points.row(i));
    CHECK(std::abs(got[g] - expected) <= 1e-10);
  }
}

TEST_CASE("overlap counts stay within the documented bound") {
  const PointMatrix probes = eval_grid(BoxDomain::unit(2), 100);
  const double bound = overlap_bound(BoxDomain::unit(2), 20, loocv_model().delta_plus());
  for (int c : overlap_counts(loocv_model(), probes)) {
    CHECK(c >= 1);
    CHECK(c <= bound);
  }
}

TEST_CASE("patch statistics") {
  const auto s = patch_stats(classic_model());
  CHECK(s.min_points >= 1);
  CHECK(s.max_points >= s.min_points);
  CHECK(s.mean_points >= s.min_points);
  CHECK(s.mean_points <= s.max_points);
}

TEST_CASE("empty patches raise CoveringError") {
  LabeledPointSet data;
  data.points.resize(3, 2);
  data.points << 0.1, 0.1, 0.12, 0.1, 0.1, 0.12;
  data.values = Eigen::VectorXd::Ones(3);
  try {
    fit_classic(data, BoxDomain::unit(2), 4, KernelFamily::imq);
    FAIL("expected CoveringError");
  } catch (const CoveringError& e) {
    CHECK(e.patch() >= 0);
    CHECK(e.n_points() == 0);
  }
  CHECK_THROWS_AS(fit_loocv(data, BoxDomain::unit(2), 4, KernelFamily::imq), CoveringError);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(fit_classic(tracks(), BoxDomain::unit(2), 20, KernelFamily::imq, 1.0, 0.5), UsageError);
  LabeledPointSet dup = test::franke_tracks(4, 5);
  dup.points.row(1) = dup.points.row(0);
  CHECK_THROWS_AS(fit_classic(dup, BoxDomain::unit(2), 4, KernelFamily::imq), ValidationError);
  LoocvSettings bad;
  bad.eps_min = 0.0;
  CHECK_THROWS_AS(fit_loocv(tracks(), BoxDomain::unit(2), 20, KernelFamily::imq, bad), UsageError);
}

TEST_CASE("fit mode tokens") {
  CHECK(parse_fit_mode("classic") == FitMode::classic);
  CHECK(parse_fit_mode(to_string(FitMode::loocv)) == FitMode::loocv);
  CHECK_THROWS_AS(parse_fit_mode("adaptive"), UsageError);
}

TEST_CASE("patch objective penalty tiers") {
  const SpatialIndex index(tracks().points);
  Point center(2);
  center << 0.5, 0.5;
  PatchObjective obj(tracks(), index, center, KernelFamily::imq);
  const double d = covering_bounds(BoxDomain::unit(2), 20, 3.0).delta_star;
  Eigen::VectorXd p(4);
  p << 1.0, 1.0, 1e-4, 1e-4;
  const double empty = obj(p);
  CHECK(empty >= kPenaltyBase + kCountPenalty);
  p << 20.0, 20.0, 2.0 * d, 2.0 * d;
  const double ok = obj(p);
  CHECK(ok < kPenaltyBase);
  CHECK(obj.last_nodes().size() >= 3);
  p << 1e-3, 1e-3, 3.0 * d, 3.0 * d;
  const double flat = obj(p);
  CHECK(flat >= kPenaltyBase);
  CHECK(flat < kPenaltyBase + kFillPenalty);
}

}
