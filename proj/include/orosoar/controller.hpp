// INDI outer-loop position controller with weighted least-squares allocation
// over (roll, pitch, thrust), an AoA-based pitch limiter and cascaded
// switching to a reduced two-axis allocation when thrust saturates at zero.
//
// Effectiveness matrices have rows (x, y, z) NED force and columns
// (roll, pitch, thrust); they are forces, the allocator divides by mass.
#pragma once

#include "orosoar/aero.hpp"
#include "orosoar/dynamics.hpp"
#include "orosoar/geometry.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace orosoar {

enum class SwitchAxis { XY, YZ };

enum class AllocationMode { ThreeAxis, ReducedXY, ReducedYZ };

std::string_view to_string(AllocationMode mode);
std::string_view to_string(SwitchAxis axis);

struct ControllerFlags {
  bool aoa_limit = false;
  bool drag_term = false;
  bool aoa_in_effectiveness = false;
  bool switching = false;

  bool operator==(const ControllerFlags&) const = default;
};

struct ControllerConfig {
  std::string name = "base";
  ControllerFlags flags;
  SwitchAxis switch_axis = SwitchAxis::XY;
  /// Add a drag-slope term to the z row of the yz reduction, which the full
  /// matrix does not have.
  bool literal_yz = false;

  Vec3 kp{1.0, 1.0, 1.0};  // 1/s^2
  Vec3 kd{1.0, 1.0, 1.0};  // 1/s
  Vec3 axis_weights{1.0, 1.0, 1.0};          // x, y, z priorities
  Vec3 actuator_weights{1.0, 1.0, 1.0};      // roll, pitch, thrust regularisers

  double roll_max = deg2rad(30.0);
  double pitch_floor = deg2rad(20.0);    // pitch >= -pitch_floor
  double pitch_ceiling = deg2rad(25.0);
  std::optional<double> alpha_max;       // defaults to the airframe's alpha_max

  double accel_limit = 6.0;              // m/s^2 per axis on the increment demand
  double switch_threshold = 0.0;         // N, unclamped thrust at or below this switches
  double accel_filter_cutoff = 0.0;      // Hz, 0 disables the measured-accel low-pass
};

/// Gains for the two circling regimes: "indoor" (longitudinal gain above
/// vertical) and "outdoor" (the reverse).
struct GainSet {
  Vec3 kp;
  Vec3 kd;
};
GainSet gain_preset(std::string_view regime);

/// The six evaluated configurations: base, aos-a, aos-d, aos-e, aos-sw, saos.
ControllerConfig controller_preset(std::string_view name);
const std::vector<std::string>& controller_preset_names();

/// INDI increment demand: kp (ref - p) - kd v - a_measured, clamped per axis.
Vec3 desired_acceleration(const Vec3& ref_position, const SimState& state,
                          const Vec3& measured_accel, const ControllerConfig& cfg);

Mat3 g_thrust(const Attitude& att, double thrust);
/// `lift` and `lift_slope` from AeroModel::lift_force / lift_slope.
Mat3 g_lift(const Attitude& att, double lift, double lift_slope);
/// Pitch column (-c.psi, -s.psi, 0) * drag_slope; the derivative of the drag
/// vector -D (c.psi, s.psi, 0) under d(alpha)/d(pitch) = 1.
Mat3 g_drag(const Attitude& att, double drag_slope);

struct Effectiveness {
  Mat3 thrust = Mat3::Zero();
  Mat3 lift = Mat3::Zero();
  Mat3 drag = Mat3::Zero();

  Mat3 sum() const { return thrust + lift + drag; }
};

/// Builds the matrices at `alpha` and `airspeed`; the drag part is zero unless
/// `with_drag`.
Effectiveness effectiveness(const Attitude& att, double thrust, double alpha, double airspeed,
                            const AeroModel& aero, bool with_drag);

/// 2x2 reduction. XY: rows {x, y} x columns {roll, pitch} of the summed
/// matrix. YZ: rows {y, z} x columns {pitch, thrust}; with `literal` the z
/// row pitch entry additionally carries s.psi * drag_slope.
Mat2 reduced_effectiveness(const Effectiveness& g, SwitchAxis axis, bool literal,
                           const Attitude& att, double drag_slope);

/// Pitch ceiling from the measured AoA: min(pitch_cmd, (alpha_max - alpha) + pitch).
double limit_pitch_by_aoa(double pitch_cmd, double alpha, double pitch, double alpha_max);

struct ControlDiagnostics {
  Vec3 accel_demand = Vec3::Zero();   // increment demand after clamping
  Vec3 increments = Vec3::Zero();     // applied (roll, pitch, thrust) increments
  double unclamped_thrust = 0.0;      // thrust candidate of the 3-axis allocation
  double alpha_used = 0.0;            // alpha fed to the force model
  bool pitch_limited = false;
};

struct ControlCommand {
  ActuatorCommand command;
  AllocationMode mode = AllocationMode::ThreeAxis;
  ControlDiagnostics diagnostics;
};

/// One control update. `measured_accel` is the INDI feedback acceleration.
ControlCommand control_step(const Vec3& ref_position, const SimState& state, const AirState& air,
                            const Vec3& measured_accel, const Aircraft& aircraft,
                            const ControllerConfig& cfg);

/// Per-run controller instance; owns the optional acceleration filter.
class Controller {
 public:
  Controller(ControllerConfig cfg, const Aircraft& aircraft, double control_period);

  ControlCommand update(const Vec3& ref_position, const SimState& state, const AirState& air,
                        const Vec3& measured_accel);

  const ControllerConfig& config() const { return cfg_; }

 private:
  ControllerConfig cfg_;
  const Aircraft* aircraft_;
  double filter_gain_;
  std::optional<Vec3> filtered_accel_;
};

struct RollCouplingProbe {
  double base_roll;      // |roll increment| of the baseline allocation, thrust saturated
  double switched_roll;  // |roll increment| of the switched yz allocation
};

/// Roll increments for a pure-x demand at zero thrust. The baseline allocates
/// over (roll, pitch) for all three axes since thrust is saturated; the
/// switched allocation uses the yz reduction, which has no roll column.
RollCouplingProbe roll_coupling_diagnostic(const Attitude& att, double alpha, double airspeed,
                                           const Vec3& accel_demand, const AeroModel& aero,
                                           const ControllerConfig& base_cfg,
                                           const ControllerConfig& switched_cfg);

}  // namespace orosoar
