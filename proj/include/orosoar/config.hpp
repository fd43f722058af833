// JSON configuration for airframes, controllers, wind fields and batches,
// plus the built-in presets the shipped config files mirror.
//
// Angles are stored in degrees in JSON (keys ending in _deg) and in radians
// everywhere else.
#pragma once

#include "orosoar/aero.hpp"
#include "orosoar/controller.hpp"
#include "orosoar/montecarlo.hpp"
#include "orosoar/windfield.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace orosoar {

using Json = nlohmann::ordered_json;

Aircraft aircraft_preset(std::string_view name);
const std::vector<std::string>& aircraft_preset_names();
Json aircraft_to_json(const Aircraft& aircraft);
Aircraft aircraft_from_json(const Json& j);

/// Missing keys keep the `base` preset's values.
Json controller_to_json(const ControllerConfig& cfg);
ControllerConfig controller_from_json(const Json& j);

Json ramp_to_json(const RampFieldParams& p);
RampFieldParams ramp_from_json(const Json& j);

/// Built-in wind presets: "ramp" (default analytic ramp) and "uniform"
/// (level floor, no updraft).
const std::vector<std::string>& wind_preset_names();
Json wind_preset_json(std::string_view name);
/// `{"type": "ramp", ...}`, `{"type": "uniform", ...}` or
/// `{"type": "grid", "file": ...}`; relative grid paths resolve against `base_dir`.
WindFieldPtr wind_from_json(const Json& j, const std::filesystem::path& base_dir);

/// Missing keys keep BatchSpec defaults; the sampling box defaults to the
/// ramp's when `ramp` is given.
Json batch_to_json(const BatchSpec& spec);
BatchSpec batch_from_json(const Json& j);

/// Reads and parses a JSON file. Errors name the path.
Json read_json_file(const std::filesystem::path& path);

/// `spec` is a preset name or a path to a JSON file.
Aircraft load_aircraft(const std::string& spec);
ControllerConfig load_controller(const std::string& spec);

struct WindSetup {
  WindFieldPtr field;
  std::optional<RampFieldParams> ramp;  // set when the field is the analytic ramp
};
/// `spec` is a preset name, a wind JSON file or a grid CSV. `nominal_speed`
/// overrides the ramp / uniform speed when given.
WindSetup load_wind(const std::string& spec, std::optional<double> nominal_speed = std::nullopt);

/// Writes every built-in preset under `dir` (aircraft/, controller/, wind/).
void write_presets(const std::filesystem::path& dir);

}  // namespace orosoar
