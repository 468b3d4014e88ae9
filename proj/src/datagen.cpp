#include "rbfpu/datagen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "rbfpu/errors.hpp"

namespace rbfpu {

std::vector<std::pair<Index, Index>> find_duplicate_points(const PointMatrix& points) {
  std::vector<Index> order(static_cast<std::size_t>(points.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  auto less = [&](Index a, Index b) {
    for (Index m = 0; m < points.cols(); ++m) {
      if (points(a, m) < points(b, m)) return true;
      if (points(a, m) > points(b, m)) return false;
    }
    return a < b;
  };
  std::sort(order.begin(), order.end(), less);
  std::vector<std::pair<Index, Index>> dups;
  for (std::size_t k = 1; k < order.size(); ++k) {
    const Index a = order[k - 1], b = order[k];
    if (points.row(a) == points.row(b)) dups.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(dups.begin(), dups.end());
  return dups;
}

void LabeledPointSet::validate() const {
  if (points.rows() != values.size())
    throw ValidationError("point set: " + std::to_string(points.rows()) + " points but " +
                          std::to_string(values.size()) + " values");
  if (points.rows() > 0 && points.cols() == 0) throw ValidationError("point set: zero-dimensional points");
  if (!points.allFinite() || !values.allFinite()) throw ValidationError("point set: non-finite entries");
  const auto dups = find_duplicate_points(points);
  if (!dups.empty()) {
    std::string msg = "point set: duplicate points at indices";
    for (std::size_t k = 0; k < dups.size() && k < 20; ++k)
      msg += " (" + std::to_string(dups[k].first) + "," + std::to_string(dups[k].second) + ")";
    if (dups.size() > 20) msg += " ...";
    throw ValidationError(msg);
  }
}

double franke(double x, double y) {
  const double a = 9.0 * x, b = 9.0 * y;
  return 0.75 * std::exp(-((a - 2.0) * (a - 2.0) + (b - 2.0) * (b - 2.0)) / 4.0) +
         0.75 * std::exp(-(a + 1.0) * (a + 1.0) / 49.0 - (b + 1.0) / 10.0) +
         0.5 * std::exp(-((a - 7.0) * (a - 7.0) + (b - 3.0) * (b - 3.0)) / 4.0) -
         0.2 * std::exp(-(a - 4.0) * (a - 4.0) - (b - 7.0) * (b - 7.0));
}

double oscillatory(double x, double y) {
  return std::sin(6.0 * std::numbers::pi * x) * std::cos(4.0 * std::numbers::pi * y);
}

std::string_view to_string(TestFunction fn) {
  return fn == TestFunction::franke ? "franke" : "oscillatory";
}

TestFunction parse_test_function(std::string_view token) {
  if (token == "franke") return TestFunction::franke;
  if (token == "oscillatory" || token == "osc") return TestFunction::oscillatory;
  throw UsageError("unknown test function '" + std::string(token) + "' (expected franke or oscillatory)");
}

double evaluate(TestFunction fn, double x, double y) {
  return fn == TestFunction::franke ? franke(x, y) : oscillatory(x, y);
}

Eigen::VectorXd sample(TestFunction fn, const PointMatrix& points) {
  if (points.cols() != 2) throw UsageError("test functions are bivariate; got dimension " + std::to_string(points.cols()));
  Eigen::VectorXd v(points.rows());
  for (Index i = 0; i < points.rows(); ++i) v[i] = evaluate(fn, points(i, 0), points(i, 1));
  return v;
}

void TrackSpec::validate() const {
  if (tracks < 1) throw UsageError("track spec: need at least one track");
  if (per_track < 2) throw UsageError("track spec: need at least two points per track");
  if (!(jitter >= 0.0) || !(jitter < 0.5 / static_cast<double>(tracks)))
    throw UsageError("track spec: jitter must lie in [0, 0.5/tracks)");
}

PointMatrix gen_tracks(const TrackSpec& spec, const BoxDomain& domain) {
  spec.validate();
  domain.validate();
  if (domain.dim() != 2) throw UsageError("gen_tracks: domain must be two-dimensional");

  SplitMix64 rng(spec.seed);
  const auto t = static_cast<double>(spec.tracks);
  const auto n = static_cast<double>(spec.per_track);
  const Point ext = domain.extent();
  PointMatrix pts(spec.tracks * spec.per_track, 2);
  Index row = 0;
  for (Index i = 0; i < spec.tracks; ++i) {
    const double line = (static_cast<double>(i) + 0.5) / t;
    for (Index k = 0; k < spec.per_track; ++k, ++row) {
      const double u = (static_cast<double>(k) + rng.uniform()) / n;
      const double v = line + spec.jitter * (2.0 * rng.uniform() - 1.0);
      pts(row, 0) = domain.lower[0] + u * ext[0];
      pts(row, 1) = domain.lower[1] + v * ext[1];
    }
  }
  return pts;
}

PointMatrix eval_grid(const BoxDomain& domain, Index s_per_axis) {
  domain.validate();
  if (s_per_axis < 2) throw UsageError("eval_grid: need at least 2 points per axis");
  const Index dim = domain.dim();
  Index count = 1;
  for (Index m = 0; m < dim; ++m) count *= s_per_axis;
  const Point h = domain.extent() / static_cast<double>(s_per_axis - 1);
  PointMatrix grid(count, dim);
  for (Index row = 0; row < count; ++row) {
    Index rest = row;
    for (Index m = dim - 1; m >= 0; --m) {
      const Index k = rest % s_per_axis;
      rest /= s_per_axis;
      grid(row, m) = k == s_per_axis - 1 ? domain.upper[m] : domain.lower[m] + static_cast<double>(k) * h[m];
    }
  }
  return grid;
}

namespace {

void check_metric_args(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
  if (pred.size() != truth.size())
    throw UsageError("error metric: prediction and truth lengths differ (" + std::to_string(pred.size()) +
                     " vs " + std::to_string(truth.size()) + ")");
  if (pred.size() == 0) throw UsageError("error metric: empty input");
}

}  // namespace

double rmse(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
  check_metric_args(pred, truth);
  double sum = 0.0;
  for (Index i = 0; i < pred.size(); ++i) sum += (pred[i] - truth[i]) * (pred[i] - truth[i]);
  return std::sqrt(sum / static_cast<double>(pred.size()));
}

double mae(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
  check_metric_args(pred, truth);
  return (pred - truth).cwiseAbs().maxCoeff();
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    auto field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
    fields.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_number(std::string_view field, std::size_t line_no) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v))
    throw ParseError("line " + std::to_string(line_no) + ": invalid number '" + std::string(field) + "'", line_no);
  return v;
}

}  // namespace

LoadedPoints parse_points_csv(std::string_view text, bool normalize) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos < text.size();) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw ParseError("empty file: missing header", 1);

  const auto header = split_fields(lines.front());
  if (header.size() < 2) throw ParseError("line 1: header needs at least one coordinate and one value column", 1);
  for (auto name : header) {
    if (name.empty()) throw ParseError("line 1: empty column name in header", 1);
    double dummy;
    const auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), dummy);
    if (ec == std::errc() && ptr == name.data() + name.size())
      throw ParseError("line 1: expected a header line, found numeric data", 1);
  }
  const auto dim = static_cast<Index>(header.size() - 1);

  std::vector<double> coords, values;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const std::size_t line_no = k + 1;
    if (lines[k].empty()) throw ParseError("line " + std::to_string(line_no) + ": empty row", line_no);
    const auto fields = split_fields(lines[k]);
    if (fields.size() != header.size())
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                           " fields, found " + std::to_string(fields.size()),
                       line_no);
    for (Index m = 0; m < dim; ++m) coords.push_back(parse_number(fields[static_cast<std::size_t>(m)], line_no));
    values.push_back(parse_number(fields.back(), line_no));
  }

  LoadedPoints out;
  const auto n = static_cast<Index>(values.size());
  out.data.points = Eigen::Map<PointMatrix>(coords.data(), n, dim);
  out.data.values = Eigen::Map<Eigen::VectorXd>(values.data(), n);
  out.data.validate();

  if (normalize && n > 0) {
    AffineMap map{out.data.points.colwise().minCoeff(), out.data.points.colwise().maxCoeff()};
    map.scale -= map.offset;
    for (Index m = 0; m < dim; ++m)
      if (!(map.scale[m] > 0.0)) throw ValidationError("normalization: coordinate " + std::to_string(m) + " is constant");
    for (Index i = 0; i < n; ++i) out.data.points.row(i) = map.apply(out.data.points.row(i));
    // The map can merge nodes that differed only below rounding.
    out.data.validate();
    out.normalization = std::move(map);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

LoadedPoints load_points_csv(const std::filesystem::path& path, bool normalize) {
  return parse_points_csv(read_file(path), normalize);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string points_csv(const LabeledPointSet& data) {
  std::string out;
  if (data.dim() == 2) {
    out = "x,y,f\n";
  } else {
    for (Index m = 0; m < data.dim(); ++m) out += "x" + std::to_string(m + 1) + ",";
    out += "f\n";
  }
  for (Index i = 0; i < data.size(); ++i) {
    for (Index m = 0; m < data.dim(); ++m) {
      out += format_double(data.points(i, m));
      out += ',';
    }
    out += format_double(data.values[i]);
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
}

}  // namespace rbfpu
