#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "rbfpu/errors.hpp"
#include "rbfpu/optimizer.hpp"

using namespace rbfpu;

namespace {

double rosenbrock(const Eigen::VectorXd& x) {
  return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Index>(v.size()));
  Index i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

}  // namespace

TEST_SUITE("optimizer") {

TEST_CASE("Rosenbrock from the classical start") {
  NmOptions opts;
  opts.max_iterations = 1000;
  opts.x_tolerance = 1e-10;
  opts.f_tolerance = 1e-12;
  const auto r = nelder_mead(rosenbrock, vec({-1.2, 1.0}), BoxBounds::unbounded(2), opts);
  CHECK(r.f < 1e-6);
  CHECK(r.iterations <= 1000);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("best trace never increases") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + trial % 4;
    Eigen::VectorXd c(n), w(n);
    for (Index k = 0; k < n; ++k) {
      c[k] = test::uniform(rng, -2.0, 2.0);
      w[k] = test::uniform(rng, 0.1, 10.0);
    }
    auto quad = [&](const Eigen::VectorXd& x) { return (w.array() * (x - c).array().square()).sum(); };
    const auto r = nelder_mead(quad, Eigen::VectorXd::Ones(n), BoxBounds::unbounded(n));
    for (std::size_t i = 1; i < r.best_trace.size(); ++i) CHECK(r.best_trace[i] <= r.best_trace[i - 1]);
    CHECK(r.f <= r.best_trace.back());
    CHECK(r.f < 1e-3);
  }
}

TEST_CASE("bounded minimum lands on the bound") {
  BoxBounds b = BoxBounds::unbounded(2);
  b.lower << 1.0, -INFINITY;
  auto f = [](const Eigen::VectorXd& x) { return x[0] * x[0] + (x[1] - 0.5) * (x[1] - 0.5); };
  NmOptions opts;
  opts.x_tolerance = 1e-8;
  opts.f_tolerance = 1e-12;
  const auto r = nelder_mead(f, vec({2.0, 0.0}), b, opts);
  CHECK(b.feasible(r.x));
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.x[1] == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("initial simplex follows the 5 percent rule") {
  std::vector<Eigen::VectorXd> seen;
  auto f = [&](const Eigen::VectorXd& x) {
    seen.push_back(x);
    return x.squaredNorm();
  };
  NmOptions opts;
  opts.max_iterations = 1;
  nelder_mead(f, vec({2.0, 0.0}), BoxBounds::unbounded(2), opts);
  REQUIRE(seen.size() >= 3);
  CHECK(seen[0] == vec({2.0, 0.0}));
  CHECK(seen[1][0] == doctest::Approx(2.1));
  CHECK(seen[1][1] == 0.0);
  CHECK(seen[2][0] == 2.0);
  CHECK(seen[2][1] == 0.00025);
}

TEST_CASE("non-finite values and infeasible vertices are penalized") {
  auto f = [](const Eigen::VectorXd& x) { return x[0] < 0.5 ? NAN : (x[0] - 1.0) * (x[0] - 1.0); };
  BoxBounds b = BoxBounds::unbounded(1);
  b.upper << 3.0;
  const auto r = nelder_mead(f, vec({2.5}), b);
  CHECK(std::isfinite(r.f));
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("infeasible candidates rank above the configured penalty") {
  BoxBounds b = BoxBounds::unbounded(1);
  b.lower << 0.0;
  // Every feasible value is a penalty of its own; a bound violation must still look worse.
  auto f = [](const Eigen::VectorXd& x) { return kPenaltyBase + 100.0 + x[0]; };
  NmOptions opts;
  opts.infeasible_penalty = kPenaltyBase + 1000.0;
  const auto r = nelder_mead(f, vec({1.0}), b, opts);
  CHECK(r.x[0] >= 0.0);
  CHECK(r.x[0] < 0.01);
}

TEST_CASE("argument checks") {
  auto f = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
  BoxBounds b = BoxBounds::unbounded(1);
  b.lower << 0.0;
  CHECK_THROWS_AS(nelder_mead(f, vec({-1.0}), b), UsageError);
  CHECK_THROWS_AS(nelder_mead(f, vec({1.0, 2.0}), b), UsageError);
  CHECK_THROWS_AS(nelder_mead([](const Eigen::VectorXd&) { return NAN; }, vec({1.0}), b), UsageError);
  NmOptions bad;
  bad.contraction = 1.5;
  CHECK_THROWS_AS(nelder_mead(f, vec({1.0}), b, bad), UsageError);
  CHECK(NmOptions{}.iteration_limit(4) == 800);
}

}
