#include "orosoar/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace orosoar {

namespace {

// Degrees are written rounded to 1e-9 so presets read back as typed.
double json_deg(double rad) { return std::round(rad2deg(rad) * 1e9) / 1e9; }

namespace fs = std::filesystem;

Aircraft make_eclipson_c() {
  AeroParams p;
  p.mass = 0.716;
  p.wing_area = 0.18;
  p.alpha_max = deg2rad(10.0);
  p.lift.cl0 = 0.4;
  p.lift.cl_alpha = 5.0;
  p.lift.alpha_stall = deg2rad(12.0);
  p.lift.junction_alpha = deg2rad(8.0);
  p.lift.cl_max = 1.30;
  p.lift.alpha_min = deg2rad(-10.0);
  p.lift.post_stall = {{deg2rad(15.0), 1.15}, {deg2rad(20.0), 0.98}, {deg2rad(30.0), 0.90}};
  p.drag = DragCurveParams{0.03, 0.06, 8.0};
  return Aircraft{"eclipson_c", 1.1, 6.0, AeroModel(p)};
}

Aircraft make_seal_g1500() {
  AeroParams p;
  p.mass = 1.21;
  p.wing_area = 0.257;
  p.alpha_max = deg2rad(11.0);
  p.lift.cl0 = 0.35;
  p.lift.cl_alpha = 4.8;
  p.lift.alpha_stall = deg2rad(13.0);
  p.lift.junction_alpha = deg2rad(9.0);
  p.lift.cl_max = 1.32;
  p.lift.alpha_min = deg2rad(-10.0);
  p.lift.post_stall = {{deg2rad(16.0), 1.17}, {deg2rad(21.0), 1.00}, {deg2rad(30.0), 0.92}};
  p.drag = DragCurveParams{0.028, 0.055, 8.0};
  return Aircraft{"seal_g1500", 1.5, 10.0, AeroModel(p)};
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

double deg_or(const Json& j, const char* key, double fallback_rad) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback_rad;
  return deg2rad(j.at(key).get<double>());
}

Vec3 vec3_or(const Json& j, const char* key, const Vec3& fallback) {
  if (!j.contains(key)) return fallback;
  const auto v = j.at(key).get<std::vector<double>>();
  if (v.size() != 3) throw ConfigError(std::string(key) + ": expected 3 values");
  return Vec3(v[0], v[1], v[2]);
}

Json vec3_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  for (char& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return e;
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError(path.string() + ": cannot open for writing");
  out << j.dump(2) << '\n';
}

}  // namespace

// ---------------------------------------------------------------------------
// Aircraft

const std::vector<std::string>& aircraft_preset_names() {
  static const std::vector<std::string> names{"eclipson_c", "seal_g1500"};
  return names;
}

Aircraft aircraft_preset(std::string_view name) {
  if (name == "eclipson_c") return make_eclipson_c();
  if (name == "seal_g1500") return make_seal_g1500();
  throw ConfigError("unknown aircraft preset '" + std::string(name) + "'");
}

Json aircraft_to_json(const Aircraft& a) {
  const AeroParams& p = a.aero.params();
  Json post = Json::array();
  for (const auto& k : p.lift.post_stall) post.push_back(Json::array({json_deg(k.alpha), k.cl}));
  Json j;
  j["name"] = a.name;
  j["wingspan"] = a.wingspan;
  j["max_thrust"] = a.max_thrust;
  j["mass"] = p.mass;
  j["wing_area"] = p.wing_area;
  j["air_density"] = p.air_density;
  j["alpha_max_deg"] = json_deg(p.alpha_max);
  j["lift"] = {{"cl0", p.lift.cl0},
               {"cl_alpha", p.lift.cl_alpha},
               {"alpha_stall_deg", json_deg(p.lift.alpha_stall)},
               {"junction_alpha_deg", json_deg(p.lift.junction_alpha)},
               {"cl_max", p.lift.cl_max},
               {"alpha_min_deg", json_deg(p.lift.alpha_min)},
               {"post_stall", post}};
  j["drag"] = {{"cd0", p.drag.cd0},
               {"induced_factor", p.drag.induced_factor},
               {"stall_rise", p.drag.stall_rise}};
  return j;
}

Aircraft aircraft_from_json(const Json& j) {
  AeroParams p;
  p.mass = j.at("mass").get<double>();
  p.wing_area = j.at("wing_area").get<double>();
  p.air_density = get_or(j, "air_density", 1.225);
  p.alpha_max = deg2rad(j.at("alpha_max_deg").get<double>());
  const Json& l = j.at("lift");
  p.lift.cl0 = l.at("cl0").get<double>();
  p.lift.cl_alpha = l.at("cl_alpha").get<double>();
  p.lift.alpha_stall = deg2rad(l.at("alpha_stall_deg").get<double>());
  p.lift.junction_alpha = deg2rad(l.at("junction_alpha_deg").get<double>());
  p.lift.cl_max = l.at("cl_max").get<double>();
  p.lift.alpha_min = deg2rad(l.at("alpha_min_deg").get<double>());
  for (const auto& k : l.at("post_stall")) {
    if (!k.is_array() || k.size() != 2) throw ConfigError("post_stall: expected [alpha_deg, cl] pairs");
    p.lift.post_stall.push_back({deg2rad(k[0].get<double>()), k[1].get<double>()});
  }
  if (j.contains("drag")) {
    const Json& d = j.at("drag");
    p.drag.cd0 = get_or(d, "cd0", p.drag.cd0);
    p.drag.induced_factor = get_or(d, "induced_factor", p.drag.induced_factor);
    p.drag.stall_rise = get_or(d, "stall_rise", p.drag.stall_rise);
  }
  const double max_thrust = j.at("max_thrust").get<double>();
  if (!(max_thrust > 0.0)) throw ConfigError("max_thrust must be positive");
  return Aircraft{get_or<std::string>(j, "name", "custom"), get_or(j, "wingspan", 0.0), max_thrust,
                  AeroModel(p)};
}

// ---------------------------------------------------------------------------
// Controller

Json controller_to_json(const ControllerConfig& c) {
  Json j;
  j["name"] = c.name;
  j["flags"] = {{"aoa_limit", c.flags.aoa_limit},
                {"drag_term", c.flags.drag_term},
                {"aoa_in_effectiveness", c.flags.aoa_in_effectiveness},
                {"switching", c.flags.switching}};
  j["switch_axis"] = std::string(to_string(c.switch_axis));
  j["literal_yz"] = c.literal_yz;
  j["kp"] = vec3_json(c.kp);
  j["kd"] = vec3_json(c.kd);
  j["axis_weights"] = vec3_json(c.axis_weights);
  j["actuator_weights"] = vec3_json(c.actuator_weights);
  j["roll_max_deg"] = json_deg(c.roll_max);
  j["pitch_floor_deg"] = json_deg(c.pitch_floor);
  j["pitch_ceiling_deg"] = json_deg(c.pitch_ceiling);
  j["alpha_max_deg"] = c.alpha_max ? Json(json_deg(*c.alpha_max)) : Json(nullptr);
  j["accel_limit"] = c.accel_limit;
  j["switch_threshold"] = c.switch_threshold;
  j["accel_filter_cutoff"] = c.accel_filter_cutoff;
  return j;
}

ControllerConfig controller_from_json(const Json& j) {
  ControllerConfig c = controller_preset("base");
  c.name = get_or<std::string>(j, "name", "custom");
  if (j.contains("flags")) {
    const Json& f = j.at("flags");
    c.flags.aoa_limit = get_or(f, "aoa_limit", false);
    c.flags.drag_term = get_or(f, "drag_term", false);
    c.flags.aoa_in_effectiveness = get_or(f, "aoa_in_effectiveness", false);
    c.flags.switching = get_or(f, "switching", false);
  }
  const std::string axis = get_or<std::string>(j, "switch_axis", "xy");
  if (axis == "xy") {
    c.switch_axis = SwitchAxis::XY;
  } else if (axis == "yz") {
    c.switch_axis = SwitchAxis::YZ;
  } else {
    throw ConfigError("switch_axis must be \"xy\" or \"yz\"");
  }
  c.literal_yz = get_or(j, "literal_yz", c.literal_yz);
  if (j.contains("gains")) {
    const GainSet g = gain_preset(j.at("gains").get<std::string>());
    c.kp = g.kp;
    c.kd = g.kd;
  }
  c.kp = vec3_or(j, "kp", c.kp);
  c.kd = vec3_or(j, "kd", c.kd);
  c.axis_weights = vec3_or(j, "axis_weights", c.axis_weights);
  c.actuator_weights = vec3_or(j, "actuator_weights", c.actuator_weights);
  c.roll_max = deg_or(j, "roll_max_deg", c.roll_max);
  c.pitch_floor = deg_or(j, "pitch_floor_deg", c.pitch_floor);
  c.pitch_ceiling = deg_or(j, "pitch_ceiling_deg", c.pitch_ceiling);
  if (j.contains("alpha_max_deg") && !j.at("alpha_max_deg").is_null()) {
    c.alpha_max = deg2rad(j.at("alpha_max_deg").get<double>());
  }
  c.accel_limit = get_or(j, "accel_limit", c.accel_limit);
  c.switch_threshold = get_or(j, "switch_threshold", c.switch_threshold);
  c.accel_filter_cutoff = get_or(j, "accel_filter_cutoff", c.accel_filter_cutoff);

  if ((c.kp.array() <= 0.0).any() || (c.kd.array() <= 0.0).any()) {
    throw ConfigError("gains must be positive");
  }
  if ((c.axis_weights.array() <= 0.0).any() || (c.actuator_weights.array() <= 0.0).any()) {
    throw ConfigError("allocation weights must be positive");
  }
  if (!(c.roll_max > 0.0 && c.pitch_floor > 0.0 && c.pitch_ceiling > 0.0)) {
    throw ConfigError("attitude limits must be positive");
  }
  if (!(c.accel_limit > 0.0) || c.accel_filter_cutoff < 0.0) {
    throw ConfigError("accel_limit must be positive and accel_filter_cutoff non-negative");
  }
  return c;
}

// ---------------------------------------------------------------------------
// Wind

Json ramp_to_json(const RampFieldParams& p) {
  Json j;
  j["nominal_speed"] = p.nominal_speed;
  j["slope_angle_deg"] = json_deg(p.slope_angle);
  j["ramp_start_x"] = p.ramp_start_x;
  j["ramp_length"] = p.ramp_length;
  j["ramp_width"] = p.ramp_width;
  j["updraft_decay_height"] = p.updraft_decay_height;
  j["speedup_factor"] = p.speedup_factor;
  j["inflow_length"] = p.inflow_length;
  j["wake_length"] = p.wake_length;
  j["edge_blend"] = p.edge_blend;
  j["upstream_extent"] = p.upstream_extent;
  j["downstream_extent"] = p.downstream_extent;
  j["ceiling"] = p.ceiling;
  return j;
}

RampFieldParams ramp_from_json(const Json& j) {
  RampFieldParams p;
  p.nominal_speed = get_or(j, "nominal_speed", p.nominal_speed);
  p.slope_angle = deg_or(j, "slope_angle_deg", p.slope_angle);
  p.ramp_start_x = get_or(j, "ramp_start_x", p.ramp_start_x);
  p.ramp_length = get_or(j, "ramp_length", p.ramp_length);
  p.ramp_width = get_or(j, "ramp_width", p.ramp_width);
  p.updraft_decay_height = get_or(j, "updraft_decay_height", p.updraft_decay_height);
  p.speedup_factor = get_or(j, "speedup_factor", p.speedup_factor);
  p.inflow_length = get_or(j, "inflow_length", p.inflow_length);
  p.wake_length = get_or(j, "wake_length", p.wake_length);
  p.edge_blend = get_or(j, "edge_blend", p.edge_blend);
  p.upstream_extent = get_or(j, "upstream_extent", p.upstream_extent);
  p.downstream_extent = get_or(j, "downstream_extent", p.downstream_extent);
  p.ceiling = get_or(j, "ceiling", p.ceiling);
  return p;
}

const std::vector<std::string>& wind_preset_names() {
  static const std::vector<std::string> names{"ramp", "uniform"};
  return names;
}

Json wind_preset_json(std::string_view name) {
  if (name == "ramp") {
    Json j;
    j["type"] = "ramp";
    j["params"] = ramp_to_json(RampFieldParams{});
    return j;
  }
  if (name == "uniform") {
    Json j;
    j["type"] = "uniform";
    j["speed"] = 7.0;
    j["x_min"] = -3.0;
    j["x_max"] = 8.0;
    j["ceiling"] = 4.5;
    return j;
  }
  throw ConfigError("unknown wind preset '" + std::string(name) + "'");
}

WindFieldPtr wind_from_json(const Json& j, const fs::path& base_dir) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "ramp") {
    return build_ramp_field(ramp_from_json(j.contains("params") ? j.at("params") : Json::object()));
  }
  if (type == "uniform") {
    return build_uniform_field(j.at("speed").get<double>(), j.at("x_min").get<double>(),
                               j.at("x_max").get<double>(), j.at("ceiling").get<double>());
  }
  if (type == "grid") {
    fs::path file = j.at("file").get<std::string>();
    if (file.is_relative()) file = base_dir / file;
    return load_grid_field(file);
  }
  throw ConfigError("unknown wind type '" + type + "'");
}

// ---------------------------------------------------------------------------
// Batch

Json batch_to_json(const BatchSpec& s) {
  Json j;
  j["n_runs"] = s.n_runs;
  j["run_duration"] = s.run_duration;
  j["warmup"] = s.warmup;
  j["window"] = s.window;
  j["nominal_wind"] = s.nominal_wind;
  j["seed"] = s.seed;
  j["box"] = {{"x_min", s.box.x_min}, {"x_max", s.box.x_max},
              {"y_min", s.box.y_min}, {"y_max", s.box.y_max},
              {"height_min", s.box.height_min}, {"height_max", s.box.height_max}};
  j["dt"] = s.dt;
  j["control_period"] = s.control_period;
  j["start_offset"] = s.start_offset;
  j["initial_alpha_deg"] = json_deg(s.initial_alpha);
  j["stall_dwell"] = s.stall_dwell;
  return j;
}

BatchSpec batch_from_json(const Json& j) {
  BatchSpec s;
  s.n_runs = get_or(j, "n_runs", s.n_runs);
  s.run_duration = get_or(j, "run_duration", s.run_duration);
  s.warmup = get_or(j, "warmup", s.warmup);
  s.window = get_or(j, "window", s.window);
  s.nominal_wind = get_or(j, "nominal_wind", s.nominal_wind);
  s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
  if (j.contains("box")) {
    const Json& b = j.at("box");
    s.box.x_min = get_or(b, "x_min", s.box.x_min);
    s.box.x_max = get_or(b, "x_max", s.box.x_max);
    s.box.y_min = get_or(b, "y_min", s.box.y_min);
    s.box.y_max = get_or(b, "y_max", s.box.y_max);
    s.box.height_min = get_or(b, "height_min", s.box.height_min);
    s.box.height_max = get_or(b, "height_max", s.box.height_max);
  }
  s.dt = get_or(j, "dt", s.dt);
  s.control_period = get_or(j, "control_period", s.control_period);
  s.start_offset = get_or(j, "start_offset", s.start_offset);
  s.initial_alpha = deg_or(j, "initial_alpha_deg", s.initial_alpha);
  s.stall_dwell = get_or(j, "stall_dwell", s.stall_dwell);
  return s;
}

// ---------------------------------------------------------------------------
// Files

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

namespace {

bool looks_like_path(const std::string& spec) {
  return spec.find('/') != std::string::npos || spec.find('.') != std::string::npos;
}

template <typename F>
auto with_path_context(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const ParseError&) {
    throw;
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw ConfigError(path + ": " + msg);
  }
}

}  // namespace

Aircraft load_aircraft(const std::string& spec) {
  if (!looks_like_path(spec)) return aircraft_preset(spec);
  return with_path_context(spec, [&] { return aircraft_from_json(read_json_file(spec)); });
}

ControllerConfig load_controller(const std::string& spec) {
  if (!looks_like_path(spec)) return controller_preset(spec);
  return with_path_context(spec, [&] { return controller_from_json(read_json_file(spec)); });
}

WindSetup load_wind(const std::string& spec, std::optional<double> nominal_speed) {
  Json j;
  fs::path base_dir = ".";
  if (!looks_like_path(spec)) {
    j = wind_preset_json(spec);
  } else if (lower_ext(spec) == ".csv") {
    if (nominal_speed) throw ConfigError(spec + ": wind speed cannot be overridden for a grid field");
    return {with_path_context(spec, [&] { return load_grid_field(spec); }), std::nullopt};
  } else {
    j = read_json_file(spec);
    base_dir = fs::path(spec).parent_path();
  }
  return with_path_context(spec, [&]() -> WindSetup {
    const std::string type = j.at("type").get<std::string>();
    if (nominal_speed) {
      if (type == "ramp") {
        if (!j.contains("params")) j["params"] = Json::object();
        j["params"]["nominal_speed"] = *nominal_speed;
      } else if (type == "uniform") {
        j["speed"] = *nominal_speed;
      } else {
        throw ConfigError("wind speed cannot be overridden for a grid field");
      }
    }
    WindSetup setup;
    setup.field = wind_from_json(j, base_dir);
    if (type == "ramp") setup.ramp = ramp_from_json(j.contains("params") ? j.at("params") : Json::object());
    return setup;
  });
}

void write_presets(const fs::path& dir) {
  fs::create_directories(dir / "aircraft");
  fs::create_directories(dir / "controller");
  fs::create_directories(dir / "wind");
  for (const auto& n : aircraft_preset_names()) {
    write_json(dir / "aircraft" / (n + ".json"), aircraft_to_json(aircraft_preset(n)));
  }
  for (const auto& n : controller_preset_names()) {
    write_json(dir / "controller" / (n + ".json"), controller_to_json(controller_preset(n)));
  }
  for (const auto& n : wind_preset_names()) {
    write_json(dir / "wind" / (n + ".json"), wind_preset_json(n));
  }
}

}  // namespace orosoar
