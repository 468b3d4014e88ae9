#include "rbfpu/model_io.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rbfpu/datagen.hpp"
#include "rbfpu/errors.hpp"

namespace rbfpu {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "rbfpu-model";
constexpr int kVersion = 1;

json row_to_json(PointRef v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Point point_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Point>(v.data(), static_cast<Index>(v.size()));
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double from_nullable(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

json model_to_json(const PUModel& model) {
  json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["domain"] = {{"lower", row_to_json(model.domain().lower)}, {"upper", row_to_json(model.domain().upper)}};
  doc["mode"] = std::string(to_string(model.mode()));
  doc["family"] = std::string(to_string(model.family()));
  doc["delta_star"] = model.delta_star();
  doc["delta_plus"] = model.delta_plus();

  json nodes = json::array();
  for (Index i = 0; i < model.nodes().rows(); ++i) nodes.push_back(row_to_json(model.nodes().row(i)));
  doc["nodes"] = std::move(nodes);

  json patches = json::array();
  for (const auto& p : model.patches()) {
    patches.push_back({
        {"center", row_to_json(p.ellipsoid.center)},
        {"semi_axes", row_to_json(p.ellipsoid.semi_axes)},
        {"eps", row_to_json(p.scale.values())},
        {"node_indices", p.node_indices},
        {"coefficients", std::vector<double>(p.coefficients.data(), p.coefficients.data() + p.coefficients.size())},
        {"loocv_error", nullable(p.loocv_error)},
        {"initial_loocv_error", nullable(p.initial_loocv_error)},
        {"rcond", p.rcond},
        {"solve_residual", p.solve_residual},
        {"optimizer_iterations", p.optimizer_iterations},
    });
  }
  doc["patches"] = std::move(patches);
  return doc;
}

PUModel model_from_json(const json& doc) {
  try {
    if (doc.value("format", std::string()) != kFormat) throw ValidationError("model file: unrecognized format tag");
    if (doc.at("version").get<int>() != kVersion) throw ValidationError("model file: unsupported version");
    BoxDomain domain{point_from_json(doc.at("domain").at("lower")), point_from_json(doc.at("domain").at("upper"))};
    const Index dim = domain.dim();

    const auto& jnodes = doc.at("nodes");
    PointMatrix nodes(static_cast<Index>(jnodes.size()), dim);
    for (std::size_t i = 0; i < jnodes.size(); ++i) {
      const Point p = point_from_json(jnodes[i]);
      if (p.size() != dim) throw ValidationError("model file: node " + std::to_string(i) + " has the wrong dimension");
      nodes.row(static_cast<Index>(i)) = p;
    }

    std::vector<PatchModel> patches;
    for (const auto& jp : doc.at("patches")) {
      PatchModel p;
      p.ellipsoid = Ellipsoid{point_from_json(jp.at("center")), point_from_json(jp.at("semi_axes"))};
      p.scale = AnisotropicScale(point_from_json(jp.at("eps")));
      p.node_indices = jp.at("node_indices").get<std::vector<Index>>();
      const auto coef = jp.at("coefficients").get<std::vector<double>>();
      p.coefficients = Eigen::Map<const Eigen::VectorXd>(coef.data(), static_cast<Index>(coef.size()));
      p.loocv_error = from_nullable(jp.at("loocv_error"));
      p.initial_loocv_error = from_nullable(jp.value("initial_loocv_error", json(nullptr)));
      p.rcond = jp.at("rcond").get<double>();
      p.solve_residual = jp.value("solve_residual", 0.0);
      p.optimizer_iterations = jp.value("optimizer_iterations", 0);
      patches.push_back(std::move(p));
    }
    return PUModel(std::move(domain), parse_kernel_family(doc.at("family").get<std::string>()),
                   parse_fit_mode(doc.at("mode").get<std::string>()),
                   {doc.at("delta_star").get<double>(), doc.at("delta_plus").get<double>()}, std::move(nodes),
                   std::move(patches));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model file: ") + e.what());
  } catch (const UsageError& e) {
    throw ValidationError(std::string("model file: ") + e.what());
  }
}

void save_model(const PUModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, model_to_json(model).dump() + "\n");
}

PUModel load_model(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model file: ") + e.what(), 0);
  }
  return model_from_json(doc);
}

}  // namespace rbfpu
