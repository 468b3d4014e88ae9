#include "rbfpu/pu.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include "rbfpu/errors.hpp"
#include "rbfpu/loocv.hpp"
#include "rbfpu/solver.hpp"

namespace rbfpu {

std::string_view to_string(FitMode mode) { return mode == FitMode::classic ? "classic" : "loocv"; }

FitMode parse_fit_mode(std::string_view token) {
  if (token == "classic") return FitMode::classic;
  if (token == "loocv") return FitMode::loocv;
  throw UsageError("unknown mode '" + std::string(token) + "' (expected classic or loocv)");
}

namespace {

double half_cell_diagonal(const BoxDomain& domain, Index t) {
  domain.validate();
  if (t < 2) throw UsageError("covering: t must be >= 2, got " + std::to_string(t));
  // The relative 1e-12 margin keeps the cell corners strictly inside their
  // ball after rounding; on the boundary every W2 weight would vanish.
  return (domain.extent() / (2.0 * static_cast<double>(t))).norm() * (1.0 + 1e-12);
}

/// Runs body(i) for i in [0, n), possibly in parallel, and rethrows the
/// exception of the lowest failing index.
template <class Body>
void for_each_index(Index n, Body&& body) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  bool failed = false;
#pragma omp parallel for schedule(dynamic)
  for (Index i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
#pragma omp atomic write
      failed = true;
    }
  }
  if (failed)
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
}

void check_data(const LabeledPointSet& data, const BoxDomain& domain) {
  domain.validate();
  if (data.size() == 0) throw UsageError("fit: data set is empty");
  if (data.dim() != domain.dim()) throw UsageError("fit: data and domain dimensions differ");
  data.validate();
}

}  // namespace

CoveringBounds covering_bounds(const BoxDomain& domain, Index t, double overlap_factor) {
  if (!(overlap_factor > 1.0) || !std::isfinite(overlap_factor))
    throw UsageError("covering_bounds: overlap factor must exceed 1");
  const double star = half_cell_diagonal(domain, t);
  return {star, overlap_factor * star};
}

PUModel::PUModel(BoxDomain domain, KernelFamily family, FitMode mode, CoveringBounds bounds,
                 PointMatrix nodes, std::vector<PatchModel> patches)
    : domain_(std::move(domain)),
      family_(family),
      mode_(mode),
      bounds_(bounds),
      nodes_(std::move(nodes)),
      patches_(std::move(patches)) {
  domain_.validate();
  if (patches_.empty()) throw UsageError("model: no patches");
  if (nodes_.cols() != domain_.dim()) throw UsageError("model: node and domain dimensions differ");

  const Index dim = domain_.dim();
  PointMatrix centers(static_cast<Index>(patches_.size()), dim);
  max_semi_axes_ = Point::Zero(dim);
  for (std::size_t j = 0; j < patches_.size(); ++j) {
    const auto& p = patches_[j];
    p.ellipsoid.validate();
    if (p.ellipsoid.dim() != dim || p.scale.dim() != dim)
      throw UsageError("model: patch " + std::to_string(j) + " has the wrong dimension");
    if (p.coefficients.size() != p.n_points())
      throw UsageError("model: patch " + std::to_string(j) + " coefficient count mismatch");
    for (Index i : p.node_indices)
      if (i < 0 || i >= nodes_.rows())
        throw UsageError("model: patch " + std::to_string(j) + " references a missing node");
    centers.row(static_cast<Index>(j)) = p.ellipsoid.center;
    max_semi_axes_ = max_semi_axes_.cwiseMax(p.ellipsoid.semi_axes);
  }
  center_index_ = std::make_shared<const SpatialIndex>(std::move(centers));
}

void PUModel::candidate_patches(PointRef x, std::vector<Index>& out) const {
  const Point lo = x - max_semi_axes_;
  const Point hi = x + max_semi_axes_;
  center_index_->points_in_box(lo, hi, out);
}

void fit_patch(PatchModel& patch, KernelFamily family, const LabeledPointSet& data) {
  const Index n = patch.n_points();
  Eigen::MatrixXd a;
  kernel_matrix_into(family, patch.scale, data.points, patch.node_indices, a);
  Eigen::VectorXd f(n);
  for (Index k = 0; k < n; ++k) f[k] = data.values[patch.node_indices[static_cast<std::size_t>(k)]];

  const auto fact = SpdFactorization::factorize(a);
  patch.coefficients = fact.solve(f);
  patch.loocv_error = rippa_loocv(fact, f);
  patch.rcond = fact.rcond();
  const double fnorm = f.norm();
  patch.solve_residual = fnorm > 0.0 ? (a * patch.coefficients - f).norm() / fnorm : 0.0;
}

PUModel fit_classic(const LabeledPointSet& data, const BoxDomain& domain, Index t, KernelFamily family,
                    double eps, double radius_factor) {
  check_data(data, domain);
  if (!(radius_factor >= 1.0) || !std::isfinite(radius_factor))
    throw UsageError("fit_classic: radius factor must be >= 1 so that the patches cover the domain");
  const AnisotropicScale scale = AnisotropicScale::isotropic(domain.dim(), eps);

  const double star = half_cell_diagonal(domain, t);
  const double radius = radius_factor * star;
  const PointMatrix centers = patch_center_grid(domain, t);
  const SpatialIndex index(data.points);

  std::vector<PatchModel> patches(static_cast<std::size_t>(centers.rows()));
  for_each_index(centers.rows(), [&](Index j) {
    auto& patch = patches[static_cast<std::size_t>(j)];
    patch.ellipsoid = Ellipsoid{centers.row(j), Point::Constant(domain.dim(), radius)};
    patch.scale = scale;
    index.points_in_ellipsoid(patch.ellipsoid, patch.node_indices);
    if (patch.node_indices.empty())
      throw CoveringError("patch " + std::to_string(j) + " contains no data points", j, 0);
    try {
      fit_patch(patch, family, data);
    } catch (const NotNumericallyPD& e) {
      throw NotNumericallyPD("patch " + std::to_string(j) + ": " + e.what(), e.pivot(), j);
    }
    patch.initial_loocv_error = std::numeric_limits<double>::quiet_NaN();
  });

  return PUModel(domain, family, FitMode::classic, {star, radius}, data.points, std::move(patches));
}

PointMatrix local_fill_probes(const Ellipsoid& ell, const BoxDomain& domain) {
  constexpr Index per_axis = 9;
  const Index dim = ell.dim();
  Index count = 1;
  for (Index m = 0; m < dim; ++m) count *= per_axis;
  PointMatrix probes(count, dim);
  Index kept = 0;
  Point x(dim);
  for (Index row = 0; row < count; ++row) {
    Index rest = row;
    for (Index m = dim - 1; m >= 0; --m) {
      const Index k = rest % per_axis;
      rest /= per_axis;
      x[m] = ell.center[m] + ell.semi_axes[m] * (2.0 * static_cast<double>(k) / (per_axis - 1) - 1.0);
    }
    if (scaled_radius_sq(ell, x) <= 1.0 && domain.contains(x)) probes.row(kept++) = x;
  }
  probes.conservativeResize(kept, dim);
  return probes;
}

double global_fill_distance(const PointMatrix& points, const BoxDomain& domain, Index t) {
  return fill_distance(points, eval_grid(domain, 4 * t + 1));
}

PatchObjective::PatchObjective(const LabeledPointSet& data, const SpatialIndex& index, Point center,
                               KernelFamily family, std::optional<FillBound> fill, double reference_length)
    : data_(data),
      index_(index),
      center_(std::move(center)),
      family_(family),
      fill_(std::move(fill)),
      reference_length_(reference_length) {
  if (!(reference_length > 0.0)) throw UsageError("patch objective: reference length must be positive");
}

double PatchObjective::local_fill(const Ellipsoid& ell) const {
  const PointMatrix probes = local_fill_probes(ell, fill_->domain);
  double worst = 0.0;
  for (Index p = 0; p < probes.rows(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (Index i : nodes_) best = std::min(best, (data_.points.row(i) - probes.row(p)).squaredNorm());
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

double PatchObjective::operator()(const Eigen::VectorXd& params) {
  const Index dim = center_.size();
  if (params.size() != 2 * dim) throw UsageError("patch objective: expected 2M parameters");
  const Point eps = params.head(dim).transpose();
  const Point delta = params.tail(dim).transpose();

  const Ellipsoid ell{center_, delta};
  index_.points_in_ellipsoid(ell, nodes_);
  const auto n = static_cast<Index>(nodes_.size());
  const Index n_min = min_patch_points(dim);
  if (n < n_min) return kPenaltyBase + kCountPenalty + static_cast<double>(n_min - n);
  if (fill_) {
    const double ratio = local_fill(ell) / fill_->max_fill;
    if (ratio > 1.0) return kPenaltyBase + kFillPenalty + std::min(100.0 * (ratio - 1.0), kCountPenalty - kFillPenalty - 1.0);
  }

  kernel_matrix_into(family_, AnisotropicScale(eps), data_.points, nodes_, a_);
  f_.resize(n);
  for (Index k = 0; k < n; ++k) f_[k] = data_.values[nodes_[static_cast<std::size_t>(k)]];

  try {
    const auto fact = SpdFactorization::factorize(a_);
    if (fact.rcond() < kRcondFloor) return unstable_penalty(eps);
    const double fnorm = f_.norm();
    if (fnorm > 0.0 && (a_ * fact.solve(f_) - f_).norm() > kResidualLimit * fnorm) return unstable_penalty(eps);
    return rippa_loocv(fact, f_);
  } catch (const NotNumericallyPD&) {
    return unstable_penalty(eps);
  }
}

double PatchObjective::unstable_penalty(const Point& eps) const {
  // Below the floor the computed rcond is dominated by rounding (the smallest
  // eigenvalue is resolved only to ~1e-16 |A|), so the barrier is graded by
  // the kernel's flatness instead: the smallest scaled node separation, and
  // the smallest eps times the reference length so that no single eps can
  // drift toward zero unpenalized.
  double s_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    for (std::size_t k = 0; k < i; ++k)
      s_min = std::min(s_min, scaled_distance(eps, data_.points.row(nodes_[i]), data_.points.row(nodes_[k])));
  const double axis = std::min(1.0, eps.minCoeff() * reference_length_);
  const double decades = s_min > 0.0 ? kFlatnessOffset - std::log10(s_min) - std::log10(axis) : 2.0 * kFlatnessOffset;
  return kPenaltyBase + std::clamp(kFlatnessWeight * decades, 0.0, 0.5 * kFillPenalty);
}

PUModel fit_loocv(const LabeledPointSet& data, const BoxDomain& domain, Index t, KernelFamily family,
                  const LoocvSettings& settings) {
  check_data(data, domain);
  if (!(settings.eps_min > 0.0)) throw UsageError("fit_loocv: eps_min must be positive");
  settings.nm.validate();
  NmOptions nm = settings.nm;
  // Out-of-bounds candidates must rank below every in-bounds penalty tier.
  nm.infeasible_penalty = std::max(nm.infeasible_penalty, kPenaltyBase + 2.0 * kCountPenalty);
  const CoveringBounds bounds = covering_bounds(domain, t, settings.overlap_factor);
  const Index dim = domain.dim();
  const PointMatrix centers = patch_center_grid(domain, t);
  const SpatialIndex index(data.points);

  Eigen::VectorXd x0(2 * dim);
  x0.head(dim).setConstant(std::max(settings.initial_eps, settings.eps_min));
  x0.tail(dim).setConstant(std::clamp(settings.initial_delta_factor * bounds.delta_star, bounds.delta_star, bounds.delta_plus));

  BoxBounds box = BoxBounds::unbounded(2 * dim);
  box.lower.head(dim).setConstant(settings.eps_min);
  box.lower.tail(dim).setConstant(bounds.delta_star);
  box.upper.tail(dim).setConstant(bounds.delta_plus);

  std::optional<FillBound> fill;
  if (settings.fill_ratio > 0.0)
    fill = FillBound{domain, settings.fill_ratio * global_fill_distance(data.points, domain, t)};

  std::vector<PatchModel> patches(static_cast<std::size_t>(centers.rows()));
  for_each_index(centers.rows(), [&](Index j) {
    double initial = std::numeric_limits<double>::quiet_NaN();
    auto search = [&](std::optional<FillBound> bound) {
      PatchObjective objective(data, index, centers.row(j), family, std::move(bound), bounds.delta_star);
      bool first = true;
      initial = std::numeric_limits<double>::quiet_NaN();
      auto tracked = [&](const Eigen::VectorXd& p) {
        const double v = objective(p);
        if (first) {
          first = false;
          if (v < kPenaltyBase) initial = v;
        }
        return v;
      };
      NmResult r = nelder_mead(tracked, x0, box, nm);
      // A simplex that collapsed against a bound while still inside a penalty
      // tier is restarted from its best vertex.
      for (int k = 0; k < kPenaltyRestarts && !(r.f < kPenaltyBase); ++k) {
        NmResult next = nelder_mead(tracked, r.x, box, nm);
        next.iterations += r.iterations;
        next.evaluations += r.evaluations;
        const bool stalled = !(next.f < r.f);
        r = std::move(next);
        if (stalled) break;
      }
      return r;
    };
    auto result = search(fill);
    if (!(result.f < kPenaltyBase) && fill) result = search(std::nullopt);
    if (!(result.f < kPenaltyBase)) {
      PatchObjective objective(data, index, centers.row(j), family);
      objective(result.x);
      throw CoveringError("patch " + std::to_string(j) + ": no feasible semi-axes capture " +
                              std::to_string(min_patch_points(dim)) + " stable points",
                          j, objective.last_nodes().size());
    }

    auto& patch = patches[static_cast<std::size_t>(j)];
    patch.scale = AnisotropicScale(result.x.head(dim).transpose());
    patch.ellipsoid = Ellipsoid{centers.row(j), result.x.tail(dim).transpose()};
    index.points_in_ellipsoid(patch.ellipsoid, patch.node_indices);
    try {
      fit_patch(patch, family, data);
    } catch (const NotNumericallyPD& e) {
      throw NotNumericallyPD("patch " + std::to_string(j) + ": " + e.what(), e.pivot(), j);
    }
    patch.optimizer_iterations = result.iterations;
    patch.initial_loocv_error = initial;
  });

  return PUModel(domain, family, FitMode::loocv, bounds, data.points, std::move(patches));
}

ShepardWeights shepard_weights(const PUModel& model, PointRef x) {
  if (x.size() != model.domain().dim()) throw UsageError("shepard_weights: dimension mismatch");
  ShepardWeights out;
  std::vector<Index> candidates;
  model.candidate_patches(x, candidates);
  double total = 0.0;
  for (Index j : candidates) {
    const auto& ell = model.patches()[static_cast<std::size_t>(j)].ellipsoid;
    const double r2 = scaled_radius_sq(ell, x);
    if (r2 >= 1.0) continue;
    const double w = phi(KernelFamily::w2, std::sqrt(r2));
    if (w > 0.0) {
      out.patches.push_back(j);
      out.weights.push_back(w);
      total += w;
    }
  }
  if (!(total > 0.0)) {
    // x lies only on patch boundaries (e.g. a domain corner of a delta* ball):
    // share the weight among the patches whose closure holds it.
    for (Index j : candidates)
      if (contains(model.patches()[static_cast<std::size_t>(j)].ellipsoid, x)) out.patches.push_back(j);
    if (!out.patches.empty()) {
      out.weights.assign(out.patches.size(), 1.0 / static_cast<double>(out.patches.size()));
      return out;
    }
    std::vector<double> p(x.data(), x.data() + x.size());
    std::string where;
    for (double v : p) where += (where.empty() ? "" : ", ") + format_double(v);
    throw CoverageError("point (" + where + ") is not covered by any patch", std::move(p));
  }
  for (double& w : out.weights) w /= total;
  return out;
}

Eigen::VectorXd evaluate(const PUModel& model, const PointMatrix& eval_points) {
  if (eval_points.cols() != model.domain().dim()) throw UsageError("evaluate: dimension mismatch");
  const auto& nodes = model.nodes();
  Eigen::VectorXd out(eval_points.rows());
  for_each_index(eval_points.rows(), [&](Index i) {
    const auto x = eval_points.row(i);
    const auto w = shepard_weights(model, x);
    double value = 0.0;
    for (std::size_t k = 0; k < w.patches.size(); ++k) {
      const auto& patch = model.patches()[static_cast<std::size_t>(w.patches[k])];
      const Point& eps = patch.scale.values();
      double local = 0.0;
      for (Index q = 0; q < patch.n_points(); ++q)
        local += patch.coefficients[q] *
                 phi(model.family(), scaled_distance(eps, x, nodes.row(patch.node_indices[static_cast<std::size_t>(q)])));
      value += w.weights[k] * local;
    }
    out[i] = value;
  });
  return out;
}

std::vector<int> overlap_counts(const PUModel& model, const PointMatrix& probes) {
  std::vector<int> counts(static_cast<std::size_t>(probes.rows()), 0);
  std::vector<Index> candidates;
  for (Index i = 0; i < probes.rows(); ++i) {
    model.candidate_patches(probes.row(i), candidates);
    for (Index j : candidates)
      if (contains(model.patches()[static_cast<std::size_t>(j)].ellipsoid, probes.row(i)))
        ++counts[static_cast<std::size_t>(i)];
  }
  return counts;
}

double overlap_bound(const BoxDomain& domain, Index t, double delta_plus) {
  const double h_min = domain.extent().minCoeff() / static_cast<double>(t);
  return std::pow(std::ceil(2.0 * delta_plus / h_min + 1.0), static_cast<double>(domain.dim()));
}

PatchStats patch_stats(const PUModel& model) {
  PatchStats s;
  s.min_points = std::numeric_limits<Index>::max();
  double sum = 0.0;
  for (const auto& p : model.patches()) {
    sum += static_cast<double>(p.n_points());
    s.max_points = std::max(s.max_points, p.n_points());
    s.min_points = std::min(s.min_points, p.n_points());
  }
  s.mean_points = sum / static_cast<double>(model.patches().size());
  return s;
}

}  // namespace rbfpu
