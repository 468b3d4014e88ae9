#pragma once

#include <random>

#include "rbfpu/datagen.hpp"
#include "rbfpu/geometry.hpp"

namespace rbfpu::test {

inline PointMatrix random_points(std::mt19937_64& rng, Index n, Index dim, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  PointMatrix p(n, dim);
  for (Index i = 0; i < n; ++i)
    for (Index m = 0; m < dim; ++m) p(i, m) = u(rng);
  return p;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// 1000-point Franke track set used throughout the fit tests.
inline LabeledPointSet franke_tracks(Index tracks = 20, Index per_track = 50) {
  LabeledPointSet data;
  data.points = gen_tracks(TrackSpec::with_default_jitter(tracks, per_track, 1), BoxDomain::unit(2));
  data.values = sample(TestFunction::franke, data.points);
  return data;
}

}  // namespace rbfpu::test
