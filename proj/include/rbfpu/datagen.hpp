#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "rbfpu/geometry.hpp"

namespace rbfpu {

/// Interpolation data: nodes (one per row) and their values.
struct LabeledPointSet {
  PointMatrix points;
  Eigen::VectorXd values;

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }

  /// Throws ValidationError on length mismatch, non-finite entries or
  /// duplicate nodes (the message lists the offending indices).
  void validate() const;
};

/// Index pairs (i, j), i < j, of identical rows.
std::vector<std::pair<Index, Index>> find_duplicate_points(const PointMatrix& points);

/// SplitMix64 generator. Every dataset in this project is drawn from it so the
/// output is reproducible bit for bit across platforms and languages.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) built from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Franke's bivariate test function.
double franke(double x, double y);

/// sin(6 pi x) cos(4 pi y), an oscillatory stand-in for real elevation data.
double oscillatory(double x, double y);

enum class TestFunction { franke, oscillatory };

std::string_view to_string(TestFunction fn);
TestFunction parse_test_function(std::string_view token);
double evaluate(TestFunction fn, double x, double y);

/// Values of a bivariate test function at every row of `points` (M must be 2).
Eigen::VectorXd sample(TestFunction fn, const PointMatrix& points);

/// Parameters of a synthetic track-data layout.
struct TrackSpec {
  Index tracks = 0;
  Index per_track = 0;
  /// Half-width of the vertical jitter band, as a fraction of the unit square.
  double jitter = 0.0;
  std::uint64_t seed = 1;

  static TrackSpec with_default_jitter(Index tracks, Index per_track, std::uint64_t seed) {
    return TrackSpec{tracks, per_track, 0.1 / static_cast<double>(tracks), seed};
  }
  void validate() const;
};

/// Horizontal tracks y = (i + 0.5) / t over a 2-D domain.
///
/// Track i holds per_track points, one drawn uniformly inside each of
/// per_track equal x-strata (so x is sorted along the track), with y offset by
/// a uniform draw from [-jitter, jitter]. Points are emitted track by track;
/// each point consumes two draws (x then y).
PointMatrix gen_tracks(const TrackSpec& spec, const BoxDomain& domain);

/// s^M equally spaced points including the domain corners, first coordinate slowest.
PointMatrix eval_grid(const BoxDomain& domain, Index s_per_axis);

double rmse(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth);
/// Maximum absolute error.
double mae(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth);

/// Per-axis affine map x -> (x - offset) / scale.
struct AffineMap {
  Point offset;
  Point scale;

  Point apply(PointRef x) const { return (x - offset).cwiseQuotient(scale); }
  Point invert(PointRef u) const { return u.cwiseProduct(scale) + offset; }
};

struct LoadedPoints {
  LabeledPointSet data;
  /// Present when min-max normalization was requested.
  std::optional<AffineMap> normalization;
};

/// Reads a dataset CSV: a header naming M coordinate columns and one value
/// column (e.g. `x,y,f`), then one comma-separated row per node. LF or CRLF.
/// Throws ParseError (with line number) or ValidationError (duplicates).
LoadedPoints load_points_csv(const std::filesystem::path& path, bool normalize = false);
LoadedPoints parse_points_csv(std::string_view text, bool normalize = false);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

/// Dataset CSV text with header x,y,f (x1..xM,f when M != 2).
std::string points_csv(const LabeledPointSet& data);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace rbfpu
