#pragma once

#include <filesystem>

#include "json.hpp"

#include "rbfpu/pu.hpp"

namespace rbfpu {

/// JSON document holding everything needed to evaluate a model: domain, mode,
/// kernel family, covering bounds, the node coordinates and, per patch, the
/// geometry, shape parameters, node indices, coefficients and diagnostics.
/// Doubles are written in shortest round-trip form, so save -> load
/// reproduces every coefficient bit for bit.
nlohmann::json model_to_json(const PUModel& model);
PUModel model_from_json(const nlohmann::json& doc);

void save_model(const PUModel& model, const std::filesystem::path& path);
PUModel load_model(const std::filesystem::path& path);

}  // namespace rbfpu
