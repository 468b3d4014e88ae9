#include "rbfpu/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rbfpu/bench.hpp"
#include "rbfpu/datagen.hpp"
#include "rbfpu/errors.hpp"
#include "rbfpu/model_io.hpp"
#include "rbfpu/pu.hpp"

namespace rbfpu::cli {
namespace {

using json = nlohmann::json;
using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

// JSON has no NaN; diagnostics that may be undefined are written as null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<double> to_vector(const Point& p) { return std::vector<double>(p.data(), p.data() + p.size()); }

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

struct GenConfig {
  Index tracks = 0;
  Index per_track = 0;
  std::optional<double> jitter;
  std::uint64_t seed = 1;
  std::string function = "franke";
  std::string out;
};

struct FitConfig {
  std::string data;
  std::string mode = "loocv";
  std::string family = "imq";
  Index t = 0;
  double overlap_factor = 3.0;
  double eps = 1.0;
  double radius_factor = 1.0;
  double eps_min = kEpsMin;
  double fill_ratio = 1.0;
  int max_iterations = 0;
  double x_tolerance = 1e-3;
  double f_tolerance = 1e-6;
  bool bbox = false;
  std::string out;
  std::string report;
  std::string patches_csv;
  std::string function;
  Index grid = 40;
};

struct EvalConfig {
  std::string model;
  Index grid = 40;
  std::string function;
  std::string truth;
  std::string out;
  std::string report;
};

struct BenchConfig {
  std::vector<int> rows;
  std::string family = "imq";
  std::string function = "franke";
  std::uint64_t seed = 1;
  Index grid = 40;
  double classic_eps = 1.0;
  double classic_radius_factor = 1.0;
  double fill_ratio = 1.0;
  std::string out;
};

// --- gen -------------------------------------------------------------------

int cmd_gen(const GenConfig& cfg) {
  TrackSpec spec = TrackSpec::with_default_jitter(cfg.tracks, cfg.per_track, cfg.seed);
  if (cfg.jitter) spec.jitter = *cfg.jitter;
  spec.validate();
  const TestFunction fn = parse_test_function(cfg.function);

  LabeledPointSet data;
  data.points = gen_tracks(spec, BoxDomain::unit(2));
  data.values = sample(fn, data.points);
  write_file_atomic(cfg.out, points_csv(data));
  std::cout << "wrote " << data.size() << " points to " << cfg.out << "\n";
  return 0;
}

// --- fit -------------------------------------------------------------------

BoxDomain fit_domain(const LabeledPointSet& data, bool bbox) {
  if (!bbox) {
    const BoxDomain unit = BoxDomain::unit(data.dim());
    for (Index i = 0; i < data.size(); ++i)
      if (!unit.contains(data.points.row(i)))
        throw ValidationError("node " + std::to_string(i) +
                              " lies outside the unit box; pass --bbox to use the data's bounding box");
    return unit;
  }
  BoxDomain domain{data.points.colwise().minCoeff(), data.points.colwise().maxCoeff()};
  for (Index m = 0; m < domain.dim(); ++m)
    if (!(domain.upper[m] > domain.lower[m]))
      throw ValidationError("bounding box is degenerate along axis " + std::to_string(m));
  return domain;
}

std::string patches_csv(const PUModel& model) {
  const Index dim = model.domain().dim();
  std::ostringstream os;
  os << "patch";
  for (Index m = 0; m < dim; ++m) os << ",c" << m + 1;
  for (Index m = 0; m < dim; ++m) os << ",delta" << m + 1;
  for (Index m = 0; m < dim; ++m) os << ",eps" << m + 1;
  os << ",n_points,loocv_error,rcond,iterations\n";
  for (std::size_t j = 0; j < model.patches().size(); ++j) {
    const PatchModel& p = model.patches()[j];
    os << j;
    for (Index m = 0; m < dim; ++m) os << ',' << format_double(p.ellipsoid.center[m]);
    for (Index m = 0; m < dim; ++m) os << ',' << format_double(p.ellipsoid.semi_axes[m]);
    for (Index m = 0; m < dim; ++m) os << ',' << format_double(p.scale[m]);
    os << ',' << p.n_points() << ',' << format_double(p.loocv_error) << ',' << format_double(p.rcond) << ','
       << p.optimizer_iterations << '\n';
  }
  return os.str();
}

json overlap_summary(const PUModel& model, Index t) {
  const PointMatrix probes = eval_grid(model.domain(), 100);
  const std::vector<int> counts = overlap_counts(model, probes);
  int lo = counts.empty() ? 0 : counts.front(), hi = lo;
  double sum = 0.0;
  for (int c : counts) {
    lo = std::min(lo, c);
    hi = std::max(hi, c);
    sum += c;
  }
  return {{"probe_grid", 100},
          {"min", lo},
          {"max", hi},
          {"mean", counts.empty() ? 0.0 : sum / static_cast<double>(counts.size())},
          {"bound", overlap_bound(model.domain(), t, model.delta_plus())}};
}

json patch_table(const PUModel& model) {
  json rows = json::array();
  for (const PatchModel& p : model.patches()) {
    rows.push_back({{"n_points", p.n_points()},
                    {"semi_axes", to_vector(p.ellipsoid.semi_axes)},
                    {"eps", to_vector(p.scale.values())},
                    {"loocv_error", number_or_null(p.loocv_error)},
                    {"rcond", number_or_null(p.rcond)},
                    {"iterations", p.optimizer_iterations}});
  }
  return rows;
}

int cmd_fit(const FitConfig& cfg) {
  const FitMode mode = parse_fit_mode(cfg.mode);
  const KernelFamily family = parse_kernel_family(cfg.family);
  std::optional<TestFunction> fn;
  if (!cfg.function.empty()) fn = parse_test_function(cfg.function);

  const LoadedPoints loaded = load_points_csv(cfg.data);
  const LabeledPointSet& data = loaded.data;
  if (data.size() == 0) throw ValidationError("'" + cfg.data + "' holds no data rows");
  const BoxDomain domain = fit_domain(data, cfg.bbox);

  auto start = clock_type::now();
  std::optional<PUModel> model;
  if (mode == FitMode::classic) {
    model.emplace(fit_classic(data, domain, cfg.t, family, cfg.eps, cfg.radius_factor));
  } else {
    LoocvSettings settings;
    settings.overlap_factor = cfg.overlap_factor;
    settings.eps_min = cfg.eps_min;
    settings.fill_ratio = cfg.fill_ratio;
    settings.nm.max_iterations = cfg.max_iterations;
    settings.nm.x_tolerance = cfg.x_tolerance;
    settings.nm.f_tolerance = cfg.f_tolerance;
    model.emplace(fit_loocv(data, domain, cfg.t, family, settings));
  }
  const double fit_time = seconds_since(start);
  save_model(*model, cfg.out);

  const PatchStats stats = patch_stats(*model);
  std::cout << "fitted " << model->patches().size() << " patches (" << to_string(mode) << ", "
            << to_string(family) << "), mean points per patch " << stats.mean_points << "\n";

  json report = {{"mode", to_string(mode)},
                 {"family", to_string(family)},
                 {"t", cfg.t},
                 {"n_points", data.size()},
                 {"delta_star", model->delta_star()},
                 {"delta_plus", model->delta_plus()},
                 {"fit_time", fit_time},
                 {"rmse", nullptr},
                 {"mae", nullptr},
                 {"eval_time", nullptr},
                 {"mean_points", stats.mean_points},
                 {"max_points", stats.max_points},
                 {"min_points", stats.min_points},
                 {"overlap", overlap_summary(*model, cfg.t)},
                 {"patches", patch_table(*model)}};

  if (fn) {
    if (domain.dim() != 2) throw UsageError("--function needs 2-D data");
    const PointMatrix grid = eval_grid(domain, cfg.grid);
    start = clock_type::now();
    const Eigen::VectorXd pred = evaluate(*model, grid);
    report["eval_time"] = seconds_since(start);
    const Eigen::VectorXd truth = sample(*fn, grid);
    report["rmse"] = rmse(pred, truth);
    report["mae"] = mae(pred, truth);
    report["function"] = to_string(*fn);
    report["grid"] = cfg.grid;
    std::cout << "grid RMSE " << format_double(rmse(pred, truth)) << ", max error " << format_double(mae(pred, truth))
              << "\n";
  }

  if (!cfg.report.empty()) write_file_atomic(cfg.report, dump(report));
  if (!cfg.patches_csv.empty()) write_file_atomic(cfg.patches_csv, patches_csv(*model));
  return 0;
}

// --- eval ------------------------------------------------------------------

int cmd_eval(const EvalConfig& cfg) {
  if (!cfg.function.empty() && !cfg.truth.empty()) throw UsageError("--function and --truth are exclusive");
  const PUModel model = load_model(cfg.model);
  const Index dim = model.domain().dim();
  const PointMatrix grid = eval_grid(model.domain(), cfg.grid);

  std::optional<Eigen::VectorXd> truth;
  if (!cfg.function.empty()) {
    if (dim != 2) throw UsageError("--function needs a 2-D model");
    truth = sample(parse_test_function(cfg.function), grid);
  } else if (!cfg.truth.empty()) {
    const LoadedPoints ref = load_points_csv(cfg.truth);
    if (ref.data.size() != grid.rows())
      throw ValidationError("truth file has " + std::to_string(ref.data.size()) + " rows, expected " +
                            std::to_string(grid.rows()));
    if (ref.data.dim() != dim) throw ValidationError("truth file dimension does not match the model");
    if ((ref.data.points - grid).cwiseAbs().maxCoeff() > 1e-9)
      throw ValidationError("truth file points do not match the evaluation grid");
    truth = ref.data.values;
  }

  const auto start = clock_type::now();
  const Eigen::VectorXd pred = evaluate(model, grid);
  const double eval_time = seconds_since(start);

  std::ostringstream os;
  if (dim == 2) {
    os << "x,y";
  } else {
    for (Index m = 0; m < dim; ++m) os << (m ? "," : "") << 'x' << m + 1;
  }
  os << ",pred" << (truth ? ",truth" : "") << '\n';
  for (Index i = 0; i < grid.rows(); ++i) {
    for (Index m = 0; m < dim; ++m) os << format_double(grid(i, m)) << ',';
    os << format_double(pred[i]);
    if (truth) os << ',' << format_double((*truth)[i]);
    os << '\n';
  }
  if (!cfg.out.empty()) write_file_atomic(cfg.out, os.str());

  json report = {{"grid", cfg.grid}, {"n_eval", grid.rows()}, {"eval_time", eval_time}, {"rmse", nullptr},
                 {"mae", nullptr}};
  std::cout << "evaluated " << grid.rows() << " points";
  if (truth) {
    report["rmse"] = rmse(pred, *truth);
    report["mae"] = mae(pred, *truth);
    std::cout << ", RMSE " << format_double(rmse(pred, *truth)) << ", max error "
              << format_double(mae(pred, *truth));
  }
  std::cout << "\n";
  if (!cfg.report.empty()) write_file_atomic(cfg.report, dump(report));
  return 0;
}

// --- bench -----------------------------------------------------------------

int cmd_bench(const BenchConfig& cfg) {
  BenchSettings settings;
  settings.family = parse_kernel_family(cfg.family);
  settings.function = parse_test_function(cfg.function);
  settings.seed = cfg.seed;
  settings.grid = cfg.grid;
  settings.classic_eps = cfg.classic_eps;
  settings.classic_radius_factor = cfg.classic_radius_factor;
  settings.loocv.fill_ratio = cfg.fill_ratio;

  const auto& cases = standard_bench_cases();
  std::vector<int> rows = cfg.rows;
  if (rows.empty())
    for (std::size_t i = 0; i < cases.size(); ++i) rows.push_back(static_cast<int>(i) + 1);
  for (int r : rows)
    if (r < 1 || r > static_cast<int>(cases.size()))
      throw UsageError("--rows entries must lie in 1.." + std::to_string(cases.size()));

  json out_rows = json::array();
  std::printf("%-16s %12s %12s %10s %10s %8s\n", "N", "RMSE classic", "RMSE LOOCV", "t classic", "t LOOCV", "factor");
  for (int r : rows) {
    const BenchCase& layout = cases[static_cast<std::size_t>(r - 1)];
    const BenchRow row = run_bench_row(layout, settings);
    out_rows.push_back(bench_row_to_json(row));
    const std::string label = std::to_string(layout.n_points()) + " (" + std::to_string(layout.tracks) + "x" +
                              std::to_string(layout.per_track) + ")";
    std::printf("%-16s %12.3e %12.3e %9.2fs %9.2fs %8.1f\n", label.c_str(), row.rmse_classic, row.rmse_loocv,
                row.time_classic, row.time_loocv, row.improvement_factor());
    std::fflush(stdout);
  }

  if (!cfg.out.empty()) {
    const json doc = {{"family", to_string(settings.family)},
                      {"function", to_string(settings.function)},
                      {"seed", settings.seed},
                      {"grid", settings.grid},
                      {"rows", out_rows}};
    write_file_atomic(cfg.out, dump(doc));
  }
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Partition-of-unity RBF interpolation with LOOCV-optimized ellipsoidal patches"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rbfpu 0.1.0");

  const auto families = CLI::IsMember({"imq", "m2", "w2"});
  const auto functions = CLI::IsMember({"franke", "oscillatory", "osc"});

  GenConfig gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic track dataset");
  gen_cmd->add_option("--tracks", gen.tracks, "Number of horizontal tracks")->required();
  gen_cmd->add_option("--per-track", gen.per_track, "Points per track")->required();
  gen_cmd->add_option("--jitter", gen.jitter, "Vertical jitter half-width (default 0.1 / tracks)");
  gen_cmd->add_option("--seed", gen.seed, "SplitMix64 seed")->capture_default_str();
  gen_cmd->add_option("--function", gen.function, "Test function")->check(functions)->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output CSV")->required();

  FitConfig fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a partition-of-unity model to a dataset CSV");
  fit_cmd->add_option("--data", fit.data, "Dataset CSV")->required();
  fit_cmd->add_option("--mode", fit.mode, "Fit mode")->check(CLI::IsMember({"classic", "loocv"}))->capture_default_str();
  fit_cmd->add_option("--family", fit.family, "Kernel family")->check(families)->capture_default_str();
  fit_cmd->add_option("--t", fit.t, "Patch centers per axis")->required();
  fit_cmd->add_option("--overlap-factor", fit.overlap_factor, "delta+ / delta*")->capture_default_str();
  fit_cmd->add_option("--eps", fit.eps, "Shape parameter (classic)")->capture_default_str();
  fit_cmd->add_option("--radius-factor", fit.radius_factor, "Patch radius in units of delta* (classic)")
      ->capture_default_str();
  fit_cmd->add_option("--eps-min", fit.eps_min, "Lower bound on shape parameters (loocv)")->capture_default_str();
  fit_cmd->add_option("--fill-ratio", fit.fill_ratio, "Local fill-distance bound, <= 0 disables (loocv)")
      ->capture_default_str();
  fit_cmd->add_option("--max-iter", fit.max_iterations, "Nelder-Mead iteration cap, 0 = 200 * dimension")
      ->capture_default_str();
  fit_cmd->add_option("--xtol", fit.x_tolerance, "Nelder-Mead simplex size tolerance")->capture_default_str();
  fit_cmd->add_option("--ftol", fit.f_tolerance, "Nelder-Mead value spread tolerance")->capture_default_str();
  fit_cmd->add_flag("--bbox", fit.bbox, "Use the data's bounding box as domain instead of the unit box");
  fit_cmd->add_option("--out", fit.out, "Model JSON")->required();
  fit_cmd->add_option("--report", fit.report, "Report JSON");
  fit_cmd->add_option("--patches-csv", fit.patches_csv, "Per-patch geometry CSV");
  fit_cmd->add_option("--function", fit.function, "Reference function for grid metrics")->check(functions);
  fit_cmd->add_option("--grid", fit.grid, "Evaluation points per axis")->capture_default_str();

  EvalConfig ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on a regular grid");
  eval_cmd->add_option("--model", ev.model, "Model JSON")->required();
  eval_cmd->add_option("--grid", ev.grid, "Evaluation points per axis")->capture_default_str();
  eval_cmd->add_option("--function", ev.function, "Reference function")->check(functions);
  eval_cmd->add_option("--truth", ev.truth, "Reference values as a dataset CSV over the grid");
  eval_cmd->add_option("--out", ev.out, "Predictions CSV");
  eval_cmd->add_option("--report", ev.report, "Metrics JSON");

  BenchConfig bench;
  auto* bench_cmd = app.add_subcommand("bench", "Compare classic and LOOCV fits on the standard track layouts");
  bench_cmd->add_option("--rows", bench.rows, "1-based row numbers (default: all five)")->delimiter(',');
  bench_cmd->add_option("--family", bench.family, "Kernel family")->check(families)->capture_default_str();
  bench_cmd->add_option("--function", bench.function, "Test function")->check(functions)->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "SplitMix64 seed")->capture_default_str();
  bench_cmd->add_option("--grid", bench.grid, "Evaluation points per axis")->capture_default_str();
  bench_cmd->add_option("--eps", bench.classic_eps, "Classic shape parameter")->capture_default_str();
  bench_cmd->add_option("--radius-factor", bench.classic_radius_factor, "Classic radius in units of delta*")
      ->capture_default_str();
  bench_cmd->add_option("--fill-ratio", bench.fill_ratio, "Local fill-distance bound of the LOOCV fit")
      ->capture_default_str();
  bench_cmd->add_option("--out", bench.out, "Results JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen);
    if (*fit_cmd) return cmd_fit(fit);
    if (*eval_cmd) return cmd_eval(ev);
    if (*bench_cmd) return cmd_bench(bench);
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace rbfpu::cli
