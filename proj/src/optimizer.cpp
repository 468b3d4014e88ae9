#include "rbfpu/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rbfpu/errors.hpp"

namespace rbfpu {

void NmOptions::validate() const {
  if (max_iterations < 0) throw UsageError("nelder_mead: max_iterations must be >= 0");
  if (!(x_tolerance >= 0.0) || !(f_tolerance >= 0.0))
    throw UsageError("nelder_mead: tolerances must be nonnegative");
  if (!(reflection > 0.0) || !(expansion > reflection) || !(contraction > 0.0 && contraction < 1.0) ||
      !(shrink > 0.0 && shrink < 1.0) || !(initial_step > 0.0))
    throw UsageError("nelder_mead: invalid simplex coefficients");
  if (!std::isfinite(infeasible_penalty)) throw UsageError("nelder_mead: infeasible_penalty must be finite");
}

BoxBounds BoxBounds::unbounded(Eigen::Index n) {
  const double inf = std::numeric_limits<double>::infinity();
  return BoxBounds{Eigen::VectorXd::Constant(n, -inf), Eigen::VectorXd::Constant(n, inf)};
}

void BoxBounds::validate() const {
  if (lower.size() != upper.size()) throw UsageError("bounds: lower/upper length mismatch");
  for (Eigen::Index k = 0; k < lower.size(); ++k) {
    if (std::isnan(lower[k]) || std::isnan(upper[k])) throw UsageError("bounds: NaN bound");
    if (std::isfinite(lower[k]) && std::isfinite(upper[k]) && !(lower[k] < upper[k]))
      throw UsageError("bounds: lower must be below upper");
  }
}

bool BoxBounds::feasible(const Eigen::VectorXd& x) const {
  return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

Eigen::VectorXd BoxBounds::clamp(const Eigen::VectorXd& x) const {
  return x.cwiseMax(lower).cwiseMin(upper);
}

double BoxBounds::violation_sq(const Eigen::VectorXd& x) const {
  return (x - clamp(x)).squaredNorm();
}

namespace {

struct Vertex {
  Eigen::VectorXd x;
  double f;
};

}  // namespace

NmResult nelder_mead(const Objective& objective, const Eigen::VectorXd& x0,
                     const BoxBounds& bounds, const NmOptions& opts) {
  opts.validate();
  bounds.validate();
  const Eigen::Index n = x0.size();
  if (n == 0) throw UsageError("nelder_mead: empty starting point");
  if (bounds.size() != n) throw UsageError("nelder_mead: bounds dimension mismatch");
  if (!x0.allFinite() || !bounds.feasible(x0)) throw UsageError("nelder_mead: x0 is infeasible");

  NmResult result;
  Vertex best_ever{x0, std::numeric_limits<double>::infinity()};

  auto wrapped = [&](const Eigen::VectorXd& x) {
    ++result.evaluations;
    double f;
    if (!bounds.feasible(x)) {
      f = opts.infeasible_penalty + bounds.violation_sq(x);
    } else {
      f = objective(x);
      if (!std::isfinite(f)) f = opts.infeasible_penalty;
    }
    if (f < best_ever.f) best_ever = Vertex{x, f};
    return f;
  };

  const double f0 = objective(x0);
  ++result.evaluations;
  if (!std::isfinite(f0)) throw UsageError("nelder_mead: objective is not finite at x0");
  best_ever = Vertex{x0, f0};

  std::vector<Vertex> simplex;
  simplex.reserve(static_cast<std::size_t>(n) + 1);
  simplex.push_back({x0, f0});
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::VectorXd v = x0;
    v[k] = v[k] != 0.0 ? (1.0 + opts.initial_step) * v[k] : 0.00025;
    const double fv = wrapped(v);
    simplex.push_back({std::move(v), fv});
  }

  auto order = [&] {
    std::stable_sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
  };
  auto converged = [&] {
    double dx = 0.0, df = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i) {
      dx = std::max(dx, (simplex[i].x - simplex[0].x).cwiseAbs().maxCoeff());
      df = std::max(df, std::abs(simplex[i].f - simplex[0].f));
    }
    return dx <= opts.x_tolerance && df <= opts.f_tolerance;
  };

  order();
  result.best_trace.push_back(simplex.front().f);
  const int limit = opts.iteration_limit(n);
  const auto last = static_cast<std::size_t>(n);

  while (result.iterations < limit) {
    if (converged()) {
      result.converged = true;
      break;
    }
    ++result.iterations;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < last; ++i) centroid += simplex[i].x;
    centroid /= static_cast<double>(n);
    const Vertex& worst = simplex[last];

    const Eigen::VectorXd xr = centroid + opts.reflection * (centroid - worst.x);
    const double fr = wrapped(xr);
    bool do_shrink = false;

    if (fr < simplex[0].f) {
      const Eigen::VectorXd xe = centroid + opts.reflection * opts.expansion * (centroid - worst.x);
      const double fe = wrapped(xe);
      simplex[last] = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
    } else if (fr < simplex[last - 1].f) {
      simplex[last] = {xr, fr};
    } else if (fr < worst.f) {
      const Eigen::VectorXd xc = centroid + opts.contraction * (xr - centroid);
      const double fc = wrapped(xc);
      if (fc <= fr) simplex[last] = {xc, fc};
      else do_shrink = true;
    } else {
      const Eigen::VectorXd xcc = centroid - opts.contraction * (centroid - worst.x);
      const double fcc = wrapped(xcc);
      if (fcc < worst.f) simplex[last] = {xcc, fcc};
      else do_shrink = true;
    }

    if (do_shrink) {
      for (std::size_t i = 1; i <= last; ++i) {
        simplex[i].x = simplex[0].x + opts.shrink * (simplex[i].x - simplex[0].x);
        simplex[i].f = wrapped(simplex[i].x);
      }
    }
    order();
    result.best_trace.push_back(simplex.front().f);
  }
  if (!result.converged) result.converged = converged();

  result.x = bounds.clamp(best_ever.x);
  if (result.x == best_ever.x) {
    result.f = best_ever.f;
  } else {
    // Only reachable when no feasible point beat the penalty wall.
    result.f = objective(result.x);
    ++result.evaluations;
  }
  return result;
}

}  // namespace rbfpu
