#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "rbfpu/datagen.hpp"
#include "rbfpu/pu.hpp"

namespace rbfpu {

/// One row of the track-data comparison: `tracks` x `per_track` nodes.
struct BenchCase {
  Index tracks = 0;
  Index per_track = 0;

  Index n_points() const { return tracks * per_track; }
};

/// The five standard layouts, 1000 (20x50) through 16000 (80x200).
const std::vector<BenchCase>& standard_bench_cases();

struct BenchSettings {
  KernelFamily family = KernelFamily::imq;
  TestFunction function = TestFunction::franke;
  std::uint64_t seed = 1;
  Index grid = 40;
  /// Isotropic shape parameter and radius (in units of delta*) of the classic fit.
  double classic_eps = 1.0;
  double classic_radius_factor = 1.0;
  LoocvSettings loocv;
};

struct BenchRow {
  BenchCase layout;
  double rmse_classic = 0.0;
  double rmse_loocv = 0.0;
  double mae_classic = 0.0;
  double mae_loocv = 0.0;
  /// Fit plus grid-evaluation wall time, seconds.
  double time_classic = 0.0;
  double time_loocv = 0.0;
  double mean_points_classic = 0.0;
  double mean_points_loocv = 0.0;

  double improvement_factor() const { return rmse_classic / rmse_loocv; }
};

/// Track data for a layout: default jitter 0.1 / tracks, values from the
/// settings' test function, patch grid t = tracks.
LabeledPointSet bench_dataset(const BenchCase& layout, const BenchSettings& settings);

BenchRow run_bench_row(const BenchCase& layout, const BenchSettings& settings);

nlohmann::json bench_row_to_json(const BenchRow& row);

}  // namespace rbfpu
