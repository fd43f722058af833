// Randomised-reference evaluation: batches of hover runs per controller
// configuration, windowed position-STD / throttle metrics and the
// convergence / divergence classification.
#pragma once

#include "orosoar/controller.hpp"
#include "orosoar/dynamics.hpp"
#include "orosoar/windfield.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace orosoar {

/// References are drawn uniformly in x, y and in height above terrain.
struct SamplingBox {
  double x_min = 0.0, x_max = 0.0;
  double y_min = 0.0, y_max = 0.0;
  double height_min = 0.3, height_max = 2.5;  // m above terrain
};

/// Box from the ramp foot to one ramp length past the crest.
SamplingBox default_sampling_box(const RampFieldParams& ramp);

struct BatchSpec {
  int n_runs = 300;
  double run_duration = 100.0;   // s
  double warmup = 10.0;          // s excluded from the metrics
  double window = 10.0;          // s
  double nominal_wind = 7.0;     // m/s
  std::uint64_t seed = 1;
  SamplingBox box;

  double dt = 0.01;               // integration step
  double control_period = 0.02;   // zero-order hold between updates
  InnerLoopModel inner;
  double start_offset = 0.3;      // m, start point drawn within this cube around the reference
  double initial_alpha = deg2rad(5.0);  // start pitch is set so the local air meets the wing at this AoA
  double stall_dwell = 0.3;       // s above alpha_stall counted as a stall
  double divergence_std = 0.5;    // m
  double convergence_std = 0.04;  // m
  double convergence_throttle = 0.03;  // fraction of max thrust
  double tail_duration = 50.0;    // s, span of the terminal throttle average
  bool keep_trajectories = false;

  int window_count() const;
  void validate() const;
};

struct WindowMetrics {
  int index = 0;
  double position_std = 0.0;   // m, sqrt(var_x + var_y + var_z)
  double mean_throttle = 0.0;  // fraction of max thrust
};

enum class RunClassification { Converged, Diverged, Neither, Crashed };
std::string_view to_string(RunClassification c);

enum class RunEnd { Completed, Stall, FieldExit, Crash };
std::string_view to_string(RunEnd e);

struct TrajectorySample {
  double t;
  Vec3 position;
  Vec3 velocity;
  Attitude attitude;
  double throttle;  // fraction of max thrust
  double airspeed;
  double alpha;
  AllocationMode mode;
};

struct RunResult {
  Vec3 reference = Vec3::Zero();
  RunClassification classification = RunClassification::Neither;
  RunEnd end = RunEnd::Completed;
  std::string crash_cause;          // Termination name when end == Crash
  double end_time = 0.0;
  std::vector<WindowMetrics> windows;
  double final_std = 0.0;           // last complete window, 0 if none
  double final_throttle = 0.0;
  double tail_throttle = 0.0;       // mean throttle over the last tail_duration s
  std::optional<double> first_switch_time;
  double throttle_after_switch = 0.0;  // peak commanded throttle fraction after the first switch
  std::vector<TrajectorySample> trajectory;  // only with keep_trajectories
};

/// n_runs references, a pure function of (spec.seed, spec.box, field terrain).
std::vector<Vec3> sample_references(const BatchSpec& spec, const WindField& field);

/// Stable hex digest of a reference list.
std::string hash_references(const std::vector<Vec3>& refs);

/// Diverged if any window exceeds the divergence STD; otherwise Converged if
/// the final window is below both convergence thresholds; otherwise Neither.
RunClassification classify(const std::vector<WindowMetrics>& windows, const BatchSpec& spec);

/// Flies one hover run at `reference`. `run_index` seeds the start offset so
/// every configuration starts from the same point.
RunResult run_single(const ControllerConfig& cfg, const Aircraft& aircraft, const WindField& field,
                     const Vec3& reference, std::uint64_t run_index, const BatchSpec& spec);

/// Same, starting from an explicit state.
RunResult run_from_state(const ControllerConfig& cfg, const Aircraft& aircraft,
                         const WindField& field, const Vec3& reference, const SimState& start,
                         const BatchSpec& spec);

struct ConfigSummary {
  std::string name;
  int converged = 0, diverged = 0, neither = 0, crashed = 0;
  double convergence_rate = 0.0;
  double divergence_rate = 0.0;   // includes crashed runs
  double neither_rate = 0.0;
  double crash_rate = 0.0;
  std::vector<double> window_mean_std;       // over non-diverged runs
  std::vector<double> window_mean_throttle;  // over non-diverged runs
  std::optional<double> converged_tail_throttle;  // mean over converged runs
  std::vector<RunResult> runs;
};

struct BatchSummary {
  BatchSpec spec;
  std::string reference_hash;
  std::vector<Vec3> references;
  std::vector<ConfigSummary> configs;
};

/// Worker count: OROSOAR_THREADS if set and positive, else hardware
/// concurrency.
unsigned worker_count();

BatchSummary run_batch(const std::vector<ControllerConfig>& cfgs, const Aircraft& aircraft,
                       const WindField& field, const BatchSpec& spec);

void write_summary_json(std::ostream& out, const BatchSummary& summary);
void write_runs_csv(std::ostream& out, const BatchSummary& summary);
void write_trajectory_csv(std::ostream& out, const std::vector<TrajectorySample>& trajectory);
/// Conv / div / neither / crash table, one row per configuration.
void write_rate_table(std::ostream& out, const BatchSummary& summary);

}  // namespace orosoar
