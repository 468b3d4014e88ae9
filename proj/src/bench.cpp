#include "rbfpu/bench.hpp"

#include <chrono>

namespace rbfpu {

const std::vector<BenchCase>& standard_bench_cases() {
  static const std::vector<BenchCase> cases{{20, 50}, {25, 80}, {40, 100}, {50, 160}, {80, 200}};
  return cases;
}

LabeledPointSet bench_dataset(const BenchCase& layout, const BenchSettings& settings) {
  const BoxDomain domain = BoxDomain::unit(2);
  LabeledPointSet data;
  data.points = gen_tracks(TrackSpec::with_default_jitter(layout.tracks, layout.per_track, settings.seed), domain);
  data.values = sample(settings.function, data.points);
  return data;
}

BenchRow run_bench_row(const BenchCase& layout, const BenchSettings& settings) {
  using clock = std::chrono::steady_clock;
  const BoxDomain domain = BoxDomain::unit(2);
  const LabeledPointSet data = bench_dataset(layout, settings);
  const PointMatrix grid = eval_grid(domain, settings.grid);
  const Eigen::VectorXd truth = sample(settings.function, grid);

  BenchRow row;
  row.layout = layout;

  auto start = clock::now();
  const PUModel classic =
      fit_classic(data, domain, layout.tracks, settings.family, settings.classic_eps, settings.classic_radius_factor);
  const Eigen::VectorXd pred_classic = evaluate(classic, grid);
  row.time_classic = std::chrono::duration<double>(clock::now() - start).count();

  start = clock::now();
  const PUModel loocv = fit_loocv(data, domain, layout.tracks, settings.family, settings.loocv);
  const Eigen::VectorXd pred_loocv = evaluate(loocv, grid);
  row.time_loocv = std::chrono::duration<double>(clock::now() - start).count();

  row.rmse_classic = rmse(pred_classic, truth);
  row.rmse_loocv = rmse(pred_loocv, truth);
  row.mae_classic = mae(pred_classic, truth);
  row.mae_loocv = mae(pred_loocv, truth);
  row.mean_points_classic = patch_stats(classic).mean_points;
  row.mean_points_loocv = patch_stats(loocv).mean_points;
  return row;
}

nlohmann::json bench_row_to_json(const BenchRow& row) {
  return {
      {"N", row.layout.n_points()},
      {"tracks", row.layout.tracks},
      {"per_track", row.layout.per_track},
      {"rmse_classic", row.rmse_classic},
      {"rmse_loocv", row.rmse_loocv},
      {"mae_classic", row.mae_classic},
      {"mae_loocv", row.mae_loocv},
      {"time_classic", row.time_classic},
      {"time_loocv", row.time_loocv},
      {"improvement_factor", row.improvement_factor()},
      {"mean_points_classic", row.mean_points_classic},
      {"mean_points_loocv", row.mean_points_loocv},
  };
}

}  // namespace rbfpu
