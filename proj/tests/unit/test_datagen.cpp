#include <cmath>
#include <filesystem>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "rbfpu/datagen.hpp"
#include "rbfpu/errors.hpp"

using namespace rbfpu;

namespace {

// Franke's function written out term by term at (x, y) = (0, 0).
double franke_at_origin() {
  const double t1 = 0.75 * std::exp(-(4.0 + 4.0) / 4.0);
  const double t2 = 0.75 * std::exp(-1.0 / 49.0 - 1.0 / 10.0);
  const double t3 = 0.5 * std::exp(-(49.0 + 9.0) / 4.0);
  const double t4 = -0.2 * std::exp(-16.0 - 49.0);
  return t1 + t2 + t3 + t4;
}

}  // namespace

TEST_SUITE("datagen") {

TEST_CASE("SplitMix64 reference stream") {
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
  CHECK(rng.next() == 0x6E789E6AA1B965F4ULL);
  CHECK(rng.next() == 0x06C45D188009454FULL);
  SplitMix64 u(42);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("test functions") {
  CHECK(franke(0.0, 0.0) == doctest::Approx(franke_at_origin()).epsilon(1e-15));
  CHECK(evaluate(TestFunction::franke, 0.3, 0.8) == franke(0.3, 0.8));
  CHECK(oscillatory(1.0 / 12.0, 0.0) == doctest::Approx(1.0));
  CHECK(oscillatory(0.25, 0.125) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(parse_test_function("osc") == TestFunction::oscillatory);
  CHECK(parse_test_function(to_string(TestFunction::franke)) == TestFunction::franke);
  CHECK_THROWS_AS(parse_test_function("peaks"), UsageError);
}

TEST_CASE("track layout") {
  const TrackSpec spec = TrackSpec::with_default_jitter(20, 50, 1);
  CHECK(spec.jitter == doctest::Approx(0.005));
  const PointMatrix p = gen_tracks(spec, BoxDomain::unit(2));
  REQUIRE(p.rows() == 1000);
  for (Index i = 0; i < 20; ++i) {
    const double line = (i + 0.5) / 20.0;
    for (Index k = 0; k < 50; ++k) {
      const Index r = i * 50 + k;
      CHECK(std::abs(p(r, 1) - line) <= spec.jitter);
      CHECK(p(r, 0) >= k / 50.0);
      CHECK(p(r, 0) < (k + 1) / 50.0);
    }
  }
}

TEST_CASE("track generation is deterministic per seed") {
  const auto a = gen_tracks(TrackSpec::with_default_jitter(5, 9, 3), BoxDomain::unit(2));
  const auto b = gen_tracks(TrackSpec::with_default_jitter(5, 9, 3), BoxDomain::unit(2));
  const auto c = gen_tracks(TrackSpec::with_default_jitter(5, 9, 4), BoxDomain::unit(2));
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("track spec validation") {
  CHECK_THROWS_AS(TrackSpec::with_default_jitter(0, 10, 1).validate(), UsageError);
  CHECK_THROWS_AS(TrackSpec::with_default_jitter(4, 1, 1).validate(), UsageError);
  CHECK_THROWS_AS((TrackSpec{4, 10, 0.2, 1}).validate(), UsageError);
  CHECK_THROWS_AS(gen_tracks(TrackSpec::with_default_jitter(4, 10, 1), BoxDomain::unit(3)), UsageError);
}

TEST_CASE("evaluation grid and error metrics") {
  const PointMatrix g = eval_grid(BoxDomain::unit(2), 40);
  CHECK(g.rows() == 1600);
  CHECK(g(0, 0) == 0.0);
  CHECK(g(1599, 0) == 1.0);
  CHECK(g(1599, 1) == 1.0);
  CHECK(g(1, 1) == doctest::Approx(1.0 / 39.0));
  Eigen::VectorXd a(3), b(3);
  a << 1, 2, 3;
  b << 1, 2, 5;
  CHECK(rmse(a, b) == doctest::Approx(std::sqrt(4.0 / 3.0)));
  CHECK(mae(a, b) == 2.0);
}

TEST_CASE("CSV parsing") {
  const auto lp = parse_points_csv("\xEF\xBB\xBFx,y,f\r\n0.5,0.25,1\r\n1e-3,2,-3.5\r\n");
  REQUIRE(lp.data.size() == 2);
  CHECK(lp.data.dim() == 2);
  CHECK(lp.data.points(1, 0) == 1e-3);
  CHECK(lp.data.values[1] == -3.5);

  const auto three = parse_points_csv("a,b,c,f\n1,2,3,4\n");
  CHECK(three.data.dim() == 3);

  CHECK(parse_points_csv("x,y,f\n").data.size() == 0);
  try {
    parse_points_csv("x,y,f\n0,0,1\n0,abc,1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_points_csv(""), ParseError);
  CHECK_THROWS_AS(parse_points_csv("0.1,0.2,3\n"), ParseError);
  CHECK_THROWS_AS(parse_points_csv("x,y,f\n1,2\n"), ParseError);
  CHECK_THROWS_AS(parse_points_csv("x,y,f\n1,2,nan\n"), ParseError);
  CHECK_THROWS_AS(parse_points_csv("x,y,f\n0.1,0.2,1\n0.1,0.2,2\n"), ValidationError);
}

TEST_CASE("min-max normalization") {
  const auto lp = parse_points_csv("x,y,f\n2,10,0\n4,20,1\n3,15,2\n", true);
  REQUIRE(lp.normalization);
  CHECK(lp.data.points(0, 0) == 0.0);
  CHECK(lp.data.points(1, 1) == 1.0);
  CHECK(lp.data.points(2, 0) == doctest::Approx(0.5));
  Point u(2);
  u << 0.5, 0.5;
  const Point back = lp.normalization->invert(u);
  CHECK(back[0] == doctest::Approx(3.0));
  CHECK(back[1] == doctest::Approx(15.0));
  CHECK_THROWS_AS(parse_points_csv("x,y,f\n1,10,0\n1,20,1\n", true), ValidationError);
}

TEST_CASE("CSV write and read round trip bit for bit") {
  LabeledPointSet data = test::franke_tracks(4, 6);
  const auto path = std::filesystem::temp_directory_path() / "rbfpu_unit_roundtrip.csv";
  write_file_atomic(path, points_csv(data));
  const auto back = load_points_csv(path);
  CHECK(back.data.points == data.points);
  CHECK(back.data.values == data.values);
  std::filesystem::remove(path);
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(std::numbers::pi)) == std::numbers::pi);
  CHECK_THROWS_AS(load_points_csv("/nonexistent/rbfpu.csv"), UsageError);
}

}
