#include "orosoar/montecarlo.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <ostream>
#include <random>
#include <thread>

namespace orosoar {

namespace {

int ticks(double span, double period) { return static_cast<int>(std::lround(span / period)); }

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(tag)};
  return std::mt19937_64(seq);
}

constexpr std::uint64_t kReferenceTag = 0x52454653;
constexpr std::uint64_t kStartTag = 0x53545254;

}  // namespace

SamplingBox default_sampling_box(const RampFieldParams& ramp) {
  const double crest_x = ramp.ramp_start_x + ramp.ramp_length * std::cos(ramp.slope_angle);
  SamplingBox box;
  box.x_min = ramp.ramp_start_x;
  box.x_max = crest_x + ramp.ramp_length;
  box.y_min = -0.25 * ramp.ramp_width;
  box.y_max = 0.25 * ramp.ramp_width;
  return box;
}

int BatchSpec::window_count() const { return ticks(run_duration - warmup, window); }

void BatchSpec::validate() const {
  if (n_runs < 1) throw ConfigError("batch: n_runs must be >= 1");
  if (!(dt > 0.0 && dt <= 0.05)) throw ConfigError("batch: dt must lie in (0, 0.05]");
  if (!(control_period >= dt) || std::abs(control_period / dt - std::round(control_period / dt)) > 1e-9) {
    throw ConfigError("batch: control_period must be a whole multiple of dt");
  }
  if (!(warmup >= 0.0 && window > 0.0 && run_duration > warmup + window - 1e-9)) {
    throw ConfigError("batch: need run_duration >= warmup + window");
  }
  const double n = (run_duration - warmup) / window;
  if (std::abs(n - std::round(n)) > 1e-9) {
    throw ConfigError("batch: window must divide run_duration - warmup");
  }
  if (std::abs(window / control_period - std::round(window / control_period)) > 1e-9 ||
      std::abs(warmup / control_period - std::round(warmup / control_period)) > 1e-9) {
    throw ConfigError("batch: warmup and window must be whole multiples of control_period");
  }
  if (!(box.x_max >= box.x_min && box.y_max >= box.y_min && box.height_max >= box.height_min &&
        box.height_min >= 0.0)) {
    throw ConfigError("batch: sampling box bounds are not ordered");
  }
  if (!(start_offset >= 0.0 && stall_dwell > 0.0 && tail_duration > 0.0)) {
    throw ConfigError("batch: start_offset, stall_dwell and tail_duration must be positive");
  }
}

std::string_view to_string(RunClassification c) {
  switch (c) {
    case RunClassification::Converged: return "converged";
    case RunClassification::Diverged: return "diverged";
    case RunClassification::Neither: return "neither";
    case RunClassification::Crashed: return "crashed";
  }
  return "unknown";
}

std::string_view to_string(RunEnd e) {
  switch (e) {
    case RunEnd::Completed: return "completed";
    case RunEnd::Stall: return "stall";
    case RunEnd::FieldExit: return "field_exit";
    case RunEnd::Crash: return "crash";
  }
  return "unknown";
}

std::vector<Vec3> sample_references(const BatchSpec& spec, const WindField& field) {
  spec.validate();
  auto rng = make_rng(spec.seed, 0, kReferenceTag);
  std::uniform_real_distribution<double> ux(spec.box.x_min, spec.box.x_max);
  std::uniform_real_distribution<double> uy(spec.box.y_min, spec.box.y_max);
  std::uniform_real_distribution<double> uh(spec.box.height_min, spec.box.height_max);
  std::vector<Vec3> refs;
  refs.reserve(static_cast<std::size_t>(spec.n_runs));
  for (int i = 0; i < spec.n_runs; ++i) {
    const double x = ux(rng);
    const double y = uy(rng);
    const double h = uh(rng);
    refs.emplace_back(x, y, -(field.terrain_altitude(x, y) + h));
  }
  return refs;
}

std::string hash_references(const std::vector<Vec3>& refs) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[96];
  for (const Vec3& r : refs) {
    const int n = std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g;", r.x(), r.y(), r.z());
    for (int i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunClassification classify(const std::vector<WindowMetrics>& windows, const BatchSpec& spec) {
  if (windows.empty()) throw ConfigError("classify: at least one window required");
  for (const auto& w : windows) {
    if (w.position_std > spec.divergence_std) return RunClassification::Diverged;
  }
  const WindowMetrics& last = windows.back();
  if (last.position_std < spec.convergence_std && last.mean_throttle < spec.convergence_throttle) {
    return RunClassification::Converged;
  }
  return RunClassification::Neither;
}

namespace {

// Accumulates one window's samples.
struct WindowAccumulator {
  std::vector<Vec3> positions;
  double throttle_sum = 0.0;

  WindowMetrics finish(int index) const {
    WindowMetrics m;
    m.index = index;
    const double n = static_cast<double>(positions.size());
    Vec3 mean = Vec3::Zero();
    for (const Vec3& p : positions) mean += p;
    mean /= n;
    double var = 0.0;
    for (const Vec3& p : positions) var += (p - mean).squaredNorm();
    m.position_std = std::sqrt(var / n);
    m.mean_throttle = throttle_sum / n;
    return m;
  }
};

}  // namespace

RunResult run_from_state(const ControllerConfig& cfg, const Aircraft& aircraft,
                         const WindField& field, const Vec3& reference, const SimState& start,
                         const BatchSpec& spec) {
  spec.validate();
  const AeroModel& aero = aircraft.aero;
  const int substeps = ticks(spec.control_period, spec.dt);
  const int total = ticks(spec.run_duration, spec.control_period);
  const int warm = ticks(spec.warmup, spec.control_period);
  const int per_window = ticks(spec.window, spec.control_period);
  const int tail_start = total - ticks(spec.tail_duration, spec.control_period);
  const int stall_ticks = std::max(1, ticks(spec.stall_dwell, spec.control_period));
  const double max_thrust = aircraft.max_thrust > 0.0 ? aircraft.max_thrust : 1.0;

  RunResult result;
  result.reference = reference;
  Controller controller(cfg, aircraft, spec.control_period);
  SimState s = start;
  WindowAccumulator acc;
  int above_stall = 0;
  double tail_sum = 0.0;
  int tail_count = 0;

  for (int k = 0; k < total; ++k) {
    result.end_time = s.time;
    if (!field.contains(s.position)) {
      result.end = RunEnd::FieldExit;
      break;
    }
    const Vec3 wind = field.sample(s.position, s.time).velocity;
    const AirState air = air_state(s, wind);
    above_stall = air.alpha > aero.alpha_stall() ? above_stall + 1 : 0;
    if (above_stall >= stall_ticks) {
      result.end = RunEnd::Stall;
      break;
    }
    const Vec3 accel = total_acceleration(s, air, aero, wind);
    const ControlCommand cmd = controller.update(reference, s, air, accel);

    const double throttle = s.thrust / max_thrust;
    if (cmd.mode != AllocationMode::ThreeAxis && !result.first_switch_time) {
      result.first_switch_time = s.time;
    }
    if (result.first_switch_time) {
      result.throttle_after_switch =
          std::max(result.throttle_after_switch, cmd.command.thrust / max_thrust);
    }
    if (spec.keep_trajectories) {
      result.trajectory.push_back(
          {s.time, s.position, s.velocity, s.attitude, throttle, air.airspeed, air.alpha, cmd.mode});
    }
    if (k >= warm) {
      acc.positions.push_back(s.position);
      acc.throttle_sum += throttle;
      if (static_cast<int>(acc.positions.size()) == per_window) {
        result.windows.push_back(acc.finish(static_cast<int>(result.windows.size())));
        acc = WindowAccumulator{};
      }
    }
    if (k >= tail_start) {
      tail_sum += throttle;
      ++tail_count;
    }

    bool crashed = false;
    for (int i = 0; i < substeps; ++i) {
      const StepResult r = step(s, cmd.command, field, aero, spec.inner, spec.dt);
      s = r.state;
      if (r.termination != Termination::None) {
        result.end = RunEnd::Crash;
        result.crash_cause = std::string(to_string(r.termination));
        crashed = true;
        break;
      }
    }
    if (crashed) {
      result.end_time = s.time;
      break;
    }
    result.end_time = s.time;
  }

  if (!result.windows.empty()) {
    result.final_std = result.windows.back().position_std;
    result.final_throttle = result.windows.back().mean_throttle;
  }
  result.tail_throttle = tail_count > 0 ? tail_sum / tail_count : 0.0;
  switch (result.end) {
    case RunEnd::Crash: result.classification = RunClassification::Crashed; break;
    case RunEnd::Stall:
    case RunEnd::FieldExit: result.classification = RunClassification::Diverged; break;
    case RunEnd::Completed: result.classification = classify(result.windows, spec); break;
  }
  return result;
}

RunResult run_single(const ControllerConfig& cfg, const Aircraft& aircraft, const WindField& field,
                     const Vec3& reference, std::uint64_t run_index, const BatchSpec& spec) {
  auto rng = make_rng(spec.seed, run_index, kStartTag);
  std::uniform_real_distribution<double> offset(-spec.start_offset, spec.start_offset);
  SimState start;
  start.position = reference;
  for (int i = 0; i < 3; ++i) start.position[i] += offset(rng);
  const double floor_alt = field.terrain_altitude(start.position.x(), start.position.y()) + 0.1;
  start.position.z() = std::min(start.position.z(), -floor_alt);
  start.attitude = Attitude{0.0, 0.0, field.upwind_heading()};
  const double alpha_level = air_state(start, field.sample(start.position).velocity).alpha;
  start.attitude.pitch = spec.initial_alpha - alpha_level;
  return run_from_state(cfg, aircraft, field, reference, start, spec);
}

unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("OROSOAR_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) n = static_cast<unsigned>(v);
  }
  return n;
}

BatchSummary run_batch(const std::vector<ControllerConfig>& cfgs, const Aircraft& aircraft,
                       const WindField& field, const BatchSpec& spec) {
  spec.validate();
  BatchSummary summary;
  summary.spec = spec;
  summary.references = sample_references(spec, field);
  summary.reference_hash = hash_references(summary.references);

  const std::size_t n_runs = summary.references.size();
  const std::size_t n_tasks = cfgs.size() * n_runs;
  std::vector<RunResult> results(n_tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n_tasks; i = next++) {
      const std::size_t c = i / n_runs, r = i % n_runs;
      try {
        results[i] = run_single(cfgs[c], aircraft, field, summary.references[r], r, spec);
      } catch (const std::exception& e) {
        RunResult failed;
        failed.reference = summary.references[r];
        failed.end = RunEnd::Crash;
        failed.classification = RunClassification::Crashed;
        failed.crash_cause = std::string("exception: ") + e.what();
        results[i] = std::move(failed);
      }
    }
  };
  const unsigned n_workers =
      static_cast<unsigned>(std::min<std::size_t>(worker_count(), std::max<std::size_t>(1, n_tasks)));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  const int n_windows = spec.window_count();
  for (std::size_t c = 0; c < cfgs.size(); ++c) {
    ConfigSummary cs;
    cs.name = cfgs[c].name;
    std::vector<double> std_sum(n_windows, 0.0), thr_sum(n_windows, 0.0);
    std::vector<int> counts(n_windows, 0);
    double tail_sum = 0.0;
    for (std::size_t r = 0; r < n_runs; ++r) {
      RunResult& run = results[c * n_runs + r];
      switch (run.classification) {
        case RunClassification::Converged:
          ++cs.converged;
          tail_sum += run.tail_throttle;
          break;
        case RunClassification::Diverged: ++cs.diverged; break;
        case RunClassification::Neither: ++cs.neither; break;
        case RunClassification::Crashed: ++cs.crashed; break;
      }
      if (run.classification == RunClassification::Converged ||
          run.classification == RunClassification::Neither) {
        for (const auto& w : run.windows) {
          std_sum[w.index] += w.position_std;
          thr_sum[w.index] += w.mean_throttle;
          ++counts[w.index];
        }
      }
      cs.runs.push_back(std::move(run));
    }
    const double n = static_cast<double>(n_runs);
    cs.convergence_rate = cs.converged / n;
    cs.divergence_rate = (cs.diverged + cs.crashed) / n;
    cs.neither_rate = cs.neither / n;
    cs.crash_rate = cs.crashed / n;
    for (int w = 0; w < n_windows; ++w) {
      cs.window_mean_std.push_back(counts[w] > 0 ? std_sum[w] / counts[w] : 0.0);
      cs.window_mean_throttle.push_back(counts[w] > 0 ? thr_sum[w] / counts[w] : 0.0);
    }
    if (cs.converged > 0) cs.converged_tail_throttle = tail_sum / cs.converged;
    summary.configs.push_back(std::move(cs));
  }
  return summary;
}

void write_summary_json(std::ostream& out, const BatchSummary& summary) {
  using nlohmann::ordered_json;
  const BatchSpec& s = summary.spec;
  ordered_json j;
  j["spec"] = {{"n_runs", s.n_runs},
               {"run_duration", s.run_duration},
               {"warmup", s.warmup},
               {"window", s.window},
               {"nominal_wind", s.nominal_wind},
               {"seed", s.seed},
               {"dt", s.dt},
               {"control_period", s.control_period}};
  j["reference_hash"] = summary.reference_hash;
  ordered_json configs = ordered_json::array();
  for (const auto& c : summary.configs) {
    ordered_json cj;
    cj["name"] = c.name;
    cj["converged"] = c.converged;
    cj["diverged"] = c.diverged;
    cj["neither"] = c.neither;
    cj["crashed"] = c.crashed;
    cj["convergence_rate"] = c.convergence_rate;
    cj["divergence_rate"] = c.divergence_rate;
    cj["neither_rate"] = c.neither_rate;
    cj["crash_rate"] = c.crash_rate;
    cj["window_mean_std"] = c.window_mean_std;
    cj["window_mean_throttle"] = c.window_mean_throttle;
    cj["converged_tail_throttle"] =
        c.converged_tail_throttle ? ordered_json(*c.converged_tail_throttle) : ordered_json(nullptr);
    configs.push_back(std::move(cj));
  }
  j["configs"] = std::move(configs);
  out << j.dump(2) << '\n';
}

void write_runs_csv(std::ostream& out, const BatchSummary& summary) {
  out << "cfg,run,ref_x,ref_y,ref_z,classification,final_std,final_throttle\n";
  char buf[256];
  for (const auto& c : summary.configs) {
    for (std::size_t r = 0; r < c.runs.size(); ++r) {
      const RunResult& run = c.runs[r];
      std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f,%s,%.6f,%.6f\n", r, run.reference.x(),
                    run.reference.y(), run.reference.z(),
                    std::string(to_string(run.classification)).c_str(), run.final_std,
                    run.final_throttle);
      out << c.name << ',' << buf;
    }
  }
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectorySample>& trajectory) {
  out << "t,x,y,z,vx,vy,vz,phi,theta,psi,throttle,V,alpha,mode\n";
  char buf[512];
  for (const auto& p : trajectory) {
    std::snprintf(buf, sizeof buf,
                  "%.4f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%s\n", p.t,
                  p.position.x(), p.position.y(), p.position.z(), p.velocity.x(), p.velocity.y(),
                  p.velocity.z(), p.attitude.roll, p.attitude.pitch, p.attitude.yaw, p.throttle,
                  p.airspeed, p.alpha, std::string(to_string(p.mode)).c_str());
    out << buf;
  }
}

void write_rate_table(std::ostream& out, const BatchSummary& summary) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s %8s %8s %8s %8s\n", "config", "conv%", "div%", "neither%",
                "crash%");
  out << buf;
  for (const auto& c : summary.configs) {
    std::snprintf(buf, sizeof buf, "%-10s %8.1f %8.1f %8.1f %8.1f\n", c.name.c_str(),
                  100.0 * c.convergence_rate, 100.0 * c.divergence_rate, 100.0 * c.neither_rate,
                  100.0 * c.crash_rate);
    out << buf;
  }
}

}  // namespace orosoar
