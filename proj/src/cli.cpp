#include "orosoar/cli.hpp"

#include "orosoar/config.hpp"
#include "orosoar/montecarlo.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace orosoar {

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::string wind = "ramp";
  std::string aircraft = "eclipson_c";
  std::optional<double> wind_speed;
  std::string out = "out";
};

std::vector<double> parse_number_list(const std::string& text, char sep, const std::string& what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size() || !std::isfinite(v)) throw std::invalid_argument(item);
      values.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError(what + ": malformed number '" + item + "' in '" + text + "'");
    }
  }
  return values;
}

Vec3 parse_ref(const std::string& text) {
  const auto v = parse_number_list(text, ',', "--ref");
  if (v.size() != 3) throw ConfigError("--ref: expected x,y,z");
  return Vec3(v[0], v[1], v[2]);
}

std::vector<double> parse_sweep(const std::string& text) {
  const auto v = parse_number_list(text, ':', "--sweep-wind");
  if (v.size() != 3 || !(v[2] > 0.0) || !(v[1] >= v[0]) || !(v[0] > 0.0)) {
    throw ConfigError("--sweep-wind: expected lo:hi:step with 0 < lo <= hi and step > 0");
  }
  std::vector<double> speeds;
  const int n = static_cast<int>(std::floor((v[1] - v[0]) / v[2] + 1e-9));
  for (int i = 0; i <= n; ++i) speeds.push_back(v[0] + i * v[2]);
  return speeds;
}

FeasibilityGrid parse_grid(const std::string& text) {
  // x_min:x_max:nx,z_min:z_max:nz  (z in NED)
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ConfigError("--grid: expected x_min:x_max:nx,z_min:z_max:nz");
  const auto xs = parse_number_list(text.substr(0, comma), ':', "--grid");
  const auto zs = parse_number_list(text.substr(comma + 1), ':', "--grid");
  if (xs.size() != 3 || zs.size() != 3) throw ConfigError("--grid: expected x_min:x_max:nx,z_min:z_max:nz");
  FeasibilityGrid g{xs[0], xs[1], zs[0], zs[1], static_cast<int>(xs[2]), static_cast<int>(zs[2])};
  if (g.nx < 2 || g.nz < 2 || xs[2] != g.nx || zs[2] != g.nz || !(g.x_max > g.x_min) ||
      !(g.z_max > g.z_min)) {
    throw ConfigError("--grid: need increasing bounds and integer counts >= 2");
  }
  return g;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError(path.string() + ": cannot open for writing");
  return f;
}

std::string speed_tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "wind_%.2f", v);
  return buf;
}

BatchSpec make_spec(const std::string& batch_file, const WindSetup& wind, const WindField& field,
                    std::optional<int> refs, std::optional<std::uint64_t> seed,
                    std::optional<double> duration) {
  BatchSpec spec;
  bool box_given = false;
  if (!batch_file.empty()) {
    const Json j = read_json_file(batch_file);
    try {
      spec = batch_from_json(j);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(batch_file + ": " + e.what());
    }
    box_given = j.contains("box");
  }
  if (!box_given) {
    if (wind.ramp) {
      spec.box = default_sampling_box(*wind.ramp);
    } else {
      // Generic fields: middle of the lattice footprint.
      if (const auto* grid = dynamic_cast<const GridField*>(&field)) {
        const double x0 = grid->xs().front(), x1 = grid->xs().back();
        spec.box.x_min = x0 + 0.25 * (x1 - x0);
        spec.box.x_max = x1 - 0.25 * (x1 - x0);
        if (!grid->is_planar()) {
          const double y0 = grid->ys().front(), y1 = grid->ys().back();
          spec.box.y_min = y0 + 0.25 * (y1 - y0);
          spec.box.y_max = y1 - 0.25 * (y1 - y0);
        }
      }
    }
  }
  if (refs) spec.n_runs = *refs;
  if (seed) spec.seed = *seed;
  if (duration) spec.run_duration = *duration;
  spec.nominal_wind = field.nominal_speed();
  spec.validate();
  return spec;
}

Json run_json(const RunResult& r, const ControllerConfig& cfg, std::uint64_t seed) {
  Json j;
  j["controller"] = cfg.name;
  j["seed"] = seed;
  j["reference"] = Json::array({r.reference.x(), r.reference.y(), r.reference.z()});
  j["classification"] = std::string(to_string(r.classification));
  j["end"] = std::string(to_string(r.end));
  if (!r.crash_cause.empty()) j["crash_cause"] = r.crash_cause;
  j["end_time"] = r.end_time;
  j["final_std"] = r.final_std;
  j["final_throttle"] = r.final_throttle;
  j["tail_throttle"] = r.tail_throttle;
  j["first_switch_time"] = r.first_switch_time ? Json(*r.first_switch_time) : Json(nullptr);
  Json windows = Json::array();
  for (const auto& w : r.windows) {
    windows.push_back({{"index", w.index}, {"position_std", w.position_std},
                       {"mean_throttle", w.mean_throttle}});
  }
  j["windows"] = windows;
  return j;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Orographic soaring simulator: single runs, Monte-Carlo batches, feasibility maps"};
  app.require_subcommand(1);

  CommonOptions common;
  std::vector<std::string> controllers;
  std::optional<int> refs;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  std::string batch_file, sweep, ref_text, grid_text;
  double grid_y = 0.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--wind", common.wind, "Wind preset (ramp, uniform), wind JSON or grid CSV");
    cmd->add_option("--aircraft", common.aircraft, "Aircraft preset or JSON file");
    cmd->add_option("--wind-speed", common.wind_speed, "Override the nominal wind speed (m/s)");
    cmd->add_option("--out", common.out, "Output directory");
  };

  auto* simulate = app.add_subcommand("simulate", "Fly one hover run and dump its trajectory");
  add_common(simulate);
  simulate->add_option("--controller", controllers, "Controller preset or JSON file")->expected(0, 1);
  simulate->add_option("--ref", ref_text, "Reference position x,y,z (NED); sampled if omitted");
  simulate->add_option("--seed", seed, "RNG seed");
  simulate->add_option("--duration", duration, "Run duration (s)");
  simulate->add_option("--batch", batch_file, "Batch spec JSON");

  auto* batch = app.add_subcommand("batch", "Monte-Carlo batch over randomised references");
  add_common(batch);
  batch->add_option("--controller", controllers, "Controller preset or JSON file (repeatable)");
  batch->add_option("--refs", refs, "Number of references");
  batch->add_option("--seed", seed, "RNG seed");
  batch->add_option("--duration", duration, "Run duration (s)");
  batch->add_option("--batch", batch_file, "Batch spec JSON");
  batch->add_option("--sweep-wind", sweep, "Repeat the batch over wind speeds lo:hi:step");
  batch->add_flag("--trajectories", "Also write per-run trajectory CSVs");

  auto* compare = app.add_subcommand("compare", "A/B batch of exactly two controllers");
  add_common(compare);
  compare->add_option("--controller", controllers, "Controller preset or JSON file (twice)");
  compare->add_option("--refs", refs, "Number of references");
  compare->add_option("--seed", seed, "RNG seed");
  compare->add_option("--duration", duration, "Run duration (s)");
  compare->add_option("--batch", batch_file, "Batch spec JSON");

  auto* feasibility = app.add_subcommand("feasibility", "Excess-updraft map over an x-z grid");
  add_common(feasibility);
  feasibility->add_option("--grid", grid_text, "x_min:x_max:nx,z_min:z_max:nz (z NED)");
  feasibility->add_option("--y", grid_y, "Lateral position of the slice");

  auto* presets = app.add_subcommand("presets", "Write the built-in presets as JSON files");
  presets->add_option("--out", common.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (presets->parsed()) {
      write_presets(common.out);
      out << "presets written to " << common.out << '\n';
      return 0;
    }

    const Aircraft aircraft = load_aircraft(common.aircraft);
    const fs::path out_dir = common.out;

    if (feasibility->parsed()) {
      const WindSetup wind = load_wind(common.wind, common.wind_speed);
      FeasibilityGrid grid{};
      if (!grid_text.empty()) {
        grid = parse_grid(grid_text);
      } else if (wind.ramp) {
        const RampField& ramp = static_cast<const RampField&>(*wind.field);
        grid = FeasibilityGrid{wind.ramp->ramp_start_x - wind.ramp->upstream_extent,
                               ramp.crest_x() + wind.ramp->downstream_extent, -wind.ramp->ceiling,
                               0.0, 61, 46};
      } else if (const auto* g = dynamic_cast<const GridField*>(wind.field.get())) {
        grid = FeasibilityGrid{g->xs().front(), g->xs().back(), g->zs().front(), g->zs().back(),
                               41, 41};
      }
      grid.y = grid_y;
      const auto points = feasibility_map(*wind.field, aircraft.aero, grid);
      auto f = open_output(out_dir / "feasibility.csv");
      write_feasibility_csv(f, points);
      out << "wrote " << (out_dir / "feasibility.csv").string() << " (" << points.size()
          << " points)\n";
      return 0;
    }

    if (simulate->parsed()) {
      const WindSetup wind = load_wind(common.wind, common.wind_speed);
      const ControllerConfig cfg = load_controller(controllers.empty() ? "saos" : controllers.front());
      BatchSpec spec = make_spec(batch_file, wind, *wind.field, 1, seed, duration);
      spec.keep_trajectories = true;
      const Vec3 ref = ref_text.empty() ? sample_references(spec, *wind.field).front()
                                        : parse_ref(ref_text);
      const RunResult r = run_single(cfg, aircraft, *wind.field, ref, 0, spec);
      {
        auto f = open_output(out_dir / "trajectory.csv");
        write_trajectory_csv(f, r.trajectory);
      }
      {
        auto f = open_output(out_dir / "run.json");
        f << run_json(r, cfg, spec.seed).dump(2) << '\n';
      }
      out << cfg.name << ": " << to_string(r.classification) << " (" << to_string(r.end)
          << ", final std " << r.final_std << " m, throttle " << r.final_throttle << ")\n";
      return 0;
    }

    const bool is_compare = compare->parsed();
    if (controllers.empty()) {
      if (is_compare) throw ConfigError("compare: give --controller twice");
      controllers = controller_preset_names();
    }
    if (is_compare && controllers.size() != 2) throw ConfigError("compare: give --controller twice");
    std::vector<ControllerConfig> cfgs;
    for (const auto& c : controllers) cfgs.push_back(load_controller(c));

    std::vector<std::optional<double>> speeds{common.wind_speed};
    if (!sweep.empty()) {
      speeds.clear();
      for (double v : parse_sweep(sweep)) speeds.emplace_back(v);
    }
    const bool trajectories = !is_compare && batch->count("--trajectories") > 0;
    for (const auto& speed : speeds) {
      const WindSetup wind = load_wind(common.wind, speed);
      BatchSpec spec = make_spec(batch_file, wind, *wind.field, refs, seed, duration);
      spec.keep_trajectories = trajectories;
      const BatchSummary summary = run_batch(cfgs, aircraft, *wind.field, spec);
      const fs::path dir = sweep.empty() ? out_dir : out_dir / speed_tag(*speed);
      {
        auto f = open_output(dir / "summary.json");
        write_summary_json(f, summary);
      }
      {
        auto f = open_output(dir / "runs.csv");
        write_runs_csv(f, summary);
      }
      if (trajectories) {
        for (const auto& c : summary.configs) {
          for (std::size_t r = 0; r < c.runs.size(); ++r) {
            auto f = open_output(dir / "trajectories" / (c.name + "_" + std::to_string(r) + ".csv"));
            write_trajectory_csv(f, c.runs[r].trajectory);
          }
        }
      }
      if (!sweep.empty()) out << "wind " << *speed << " m/s\n";
      write_rate_table(out, summary);
      if (is_compare) {
        const auto& a = summary.configs[0];
        const auto& b = summary.configs[1];
        char buf[160];
        std::snprintf(buf, sizeof buf, "delta conv %+.1f%%  delta div %+.1f%%  (%s - %s)\n",
                      100.0 * (b.convergence_rate - a.convergence_rate),
                      100.0 * (b.divergence_rate - a.divergence_rate), b.name.c_str(),
                      a.name.c_str());
        out << buf;
      }
    }
    return 0;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace orosoar
