#include "orosoar/controller.hpp"

#include "orosoar/allocation.hpp"

#include <algorithm>
#include <cmath>

namespace orosoar {

std::string_view to_string(AllocationMode mode) {
  switch (mode) {
    case AllocationMode::ThreeAxis: return "three_axis";
    case AllocationMode::ReducedXY: return "reduced_xy";
    case AllocationMode::ReducedYZ: return "reduced_yz";
  }
  return "unknown";
}

std::string_view to_string(SwitchAxis axis) { return axis == SwitchAxis::XY ? "xy" : "yz"; }

GainSet gain_preset(std::string_view regime) {
  if (regime == "indoor") return {Vec3(1.2, 1.0, 0.6), Vec3(1.6, 1.6, 1.2)};
  if (regime == "outdoor") return {Vec3(0.6, 1.0, 1.2), Vec3(1.2, 1.6, 1.6)};
  throw ConfigError("unknown gain regime '" + std::string(regime) + "'");
}

const std::vector<std::string>& controller_preset_names() {
  static const std::vector<std::string> names{"base", "aos-a", "aos-d", "aos-e", "aos-sw", "saos"};
  return names;
}

ControllerConfig controller_preset(std::string_view name) {
  ControllerConfig cfg;
  const GainSet gains = gain_preset("indoor");
  cfg.kp = gains.kp;
  cfg.kd = gains.kd;
  cfg.axis_weights = Vec3(1.0, 1.0, 1.0);
  cfg.actuator_weights = Vec3(0.5, 0.5, 0.05);
  cfg.name = std::string(name);
  ControllerFlags& f = cfg.flags;
  if (name == "base") {
  } else if (name == "aos-a") {
    f.aoa_limit = true;
  } else if (name == "aos-d") {
    f.drag_term = true;
  } else if (name == "aos-e") {
    f.drag_term = true;
    f.aoa_in_effectiveness = true;
  } else if (name == "aos-sw") {
    f.switching = true;
  } else if (name == "saos") {
    f = ControllerFlags{true, true, true, true};
  } else {
    throw ConfigError("unknown controller preset '" + std::string(name) + "'");
  }
  return cfg;
}

Vec3 desired_acceleration(const Vec3& ref_position, const SimState& state,
                          const Vec3& measured_accel, const ControllerConfig& cfg) {
  const Vec3 target = cfg.kp.cwiseProduct(ref_position - state.position) -
                      cfg.kd.cwiseProduct(state.velocity);
  return (target - measured_accel).cwiseMax(-cfg.accel_limit).cwiseMin(cfg.accel_limit);
}

Mat3 g_thrust(const Attitude& att, double thrust) {
  const double cphi = std::cos(att.roll), sphi = std::sin(att.roll);
  const double cth = std::cos(att.pitch), sth = std::sin(att.pitch);
  const double cpsi = std::cos(att.yaw), spsi = std::sin(att.yaw);
  const double t = thrust;
  Mat3 g;
  g << -cphi * sth * spsi * t, (-sth * cpsi - sphi * cth * spsi) * t, cth * cpsi - sphi * sth * spsi,
      cphi * sth * cpsi * t, (-sth * spsi + sphi * cth * cpsi) * t, cth * spsi + sphi * sth * cpsi,
      sphi * sth * t, -cphi * cth * t, -cphi * sth;
  return g;
}

Mat3 g_lift(const Attitude& att, double lift, double lift_slope) {
  const double cphi = std::cos(att.roll), sphi = std::sin(att.roll);
  const double cpsi = std::cos(att.yaw), spsi = std::sin(att.yaw);
  Mat3 g;
  g << cphi * spsi * lift, sphi * spsi * lift_slope, 0.0,
      -cphi * cpsi * lift, -sphi * cpsi * lift_slope, 0.0,
      -sphi * lift, cphi * lift_slope, 0.0;
  return g;
}

Mat3 g_drag(const Attitude& att, double drag_slope) {
  const double cpsi = std::cos(att.yaw), spsi = std::sin(att.yaw);
  Mat3 g = Mat3::Zero();
  g(0, 1) = -cpsi * drag_slope;
  g(1, 1) = -spsi * drag_slope;
  return g;
}

Effectiveness effectiveness(const Attitude& att, double thrust, double alpha, double airspeed,
                            const AeroModel& aero, bool with_drag) {
  Effectiveness g;
  g.thrust = g_thrust(att, thrust);
  g.lift = g_lift(att, aero.lift_force(alpha, airspeed), aero.lift_slope(alpha, airspeed));
  if (with_drag) g.drag = g_drag(att, aero.drag_slope(alpha, airspeed));
  return g;
}

Mat2 reduced_effectiveness(const Effectiveness& g, SwitchAxis axis, bool literal,
                           const Attitude& att, double drag_slope) {
  const Mat3 sum = g.sum();
  if (axis == SwitchAxis::XY) return sum.block<2, 2>(0, 0);
  Mat2 r = sum.block<2, 2>(1, 1);
  if (literal) r(1, 0) += std::sin(att.yaw) * drag_slope;
  return r;
}

double limit_pitch_by_aoa(double pitch_cmd, double alpha, double pitch, double alpha_max) {
  return std::min(pitch_cmd, (alpha_max - alpha) + pitch);
}

ControlCommand control_step(const Vec3& ref_position, const SimState& state, const AirState& air,
                            const Vec3& measured_accel, const Aircraft& aircraft,
                            const ControllerConfig& cfg) {
  const AeroModel& aero = aircraft.aero;
  const Attitude& att = state.attitude;
  const double mass = aero.mass();
  auto clamp_roll = [&](double v) { return std::clamp(v, -cfg.roll_max, cfg.roll_max); };
  auto clamp_pitch = [&](double v) { return std::clamp(v, -cfg.pitch_floor, cfg.pitch_ceiling); };

  ControlCommand out;
  ControlDiagnostics& diag = out.diagnostics;
  diag.accel_demand = desired_acceleration(ref_position, state, measured_accel, cfg);

  const bool measured_alpha = cfg.flags.aoa_in_effectiveness && air.alpha_reliable;
  diag.alpha_used = measured_alpha ? air.alpha : att.pitch;
  const Effectiveness g =
      effectiveness(att, state.thrust, diag.alpha_used, air.airspeed, aero, cfg.flags.drag_term);
  const Mat3 full = g.sum();

  const Eigen::VectorXd du =
      allocate(full, diag.accel_demand, cfg.axis_weights, cfg.actuator_weights, mass);
  diag.unclamped_thrust = state.thrust + du[2];

  ActuatorCommand& cmd = out.command;
  cmd.roll = clamp_roll(att.roll + du[0]);
  cmd.pitch = clamp_pitch(att.pitch + du[1]);
  cmd.thrust = std::clamp(diag.unclamped_thrust, 0.0, aircraft.max_thrust);

  if (cfg.flags.switching && diag.unclamped_thrust <= cfg.switch_threshold) {
    cmd.thrust = 0.0;
    const double drag_slope =
        cfg.flags.drag_term ? aero.drag_slope(diag.alpha_used, air.airspeed) : 0.0;
    const Mat2 reduced = reduced_effectiveness(g, cfg.switch_axis, cfg.literal_yz, att, drag_slope);
    if (cfg.switch_axis == SwitchAxis::XY) {
      // Thrust drops to zero; remove its effect from the x/y demand.
      const Eigen::Vector2d thrust_effect = full.block<2, 1>(0, 2) * (-state.thrust) / mass;
      const Eigen::Vector2d demand = diag.accel_demand.head<2>() - thrust_effect;
      const Eigen::VectorXd dr =
          allocate(reduced, demand, cfg.axis_weights.head<2>(), cfg.actuator_weights.head<2>(), mass);
      cmd.roll = clamp_roll(att.roll + dr[0]);
      cmd.pitch = clamp_pitch(att.pitch + dr[1]);
      out.mode = AllocationMode::ReducedXY;
    } else {
      const Eigen::VectorXd dr = allocate(reduced, diag.accel_demand.tail<2>(),
                                          cfg.axis_weights.tail<2>(),
                                          cfg.actuator_weights.tail<2>(), mass);
      cmd.roll = clamp_roll(att.roll);
      cmd.pitch = clamp_pitch(att.pitch + dr[0]);
      out.mode = AllocationMode::ReducedYZ;
    }
  }

  if (cfg.flags.aoa_limit) {
    const double alpha_max = cfg.alpha_max.value_or(aero.alpha_max());
    const double limited = air.alpha_reliable
                               ? limit_pitch_by_aoa(cmd.pitch, air.alpha, att.pitch, alpha_max)
                               : std::min(cmd.pitch, cfg.pitch_ceiling);
    if (limited < cmd.pitch) {
      cmd.pitch = clamp_pitch(limited);
      diag.pitch_limited = true;
    }
  }

  diag.increments = Vec3(cmd.roll - att.roll, cmd.pitch - att.pitch, cmd.thrust - state.thrust);
  return out;
}

Controller::Controller(ControllerConfig cfg, const Aircraft& aircraft, double control_period)
    : cfg_(std::move(cfg)), aircraft_(&aircraft), filter_gain_(1.0) {
  if (cfg_.accel_filter_cutoff > 0.0) {
    const double rc = 1.0 / (2.0 * std::numbers::pi * cfg_.accel_filter_cutoff);
    filter_gain_ = control_period / (control_period + rc);
  }
}

ControlCommand Controller::update(const Vec3& ref_position, const SimState& state,
                                  const AirState& air, const Vec3& measured_accel) {
  if (!filtered_accel_) {
    filtered_accel_ = measured_accel;
  } else {
    *filtered_accel_ += filter_gain_ * (measured_accel - *filtered_accel_);
  }
  return control_step(ref_position, state, air, *filtered_accel_, *aircraft_, cfg_);
}

RollCouplingProbe roll_coupling_diagnostic(const Attitude& att, double alpha, double airspeed,
                                           const Vec3& accel_demand, const AeroModel& aero,
                                           const ControllerConfig& base_cfg,
                                           const ControllerConfig& switched_cfg) {
  const double mass = aero.mass();

  const Effectiveness base = effectiveness(att, 0.0, alpha, airspeed, aero, base_cfg.flags.drag_term);
  const Eigen::MatrixXd attitude_columns = base.sum().leftCols<2>();
  const Eigen::VectorXd du_base = allocate(attitude_columns, accel_demand, base_cfg.axis_weights,
                                           base_cfg.actuator_weights.head<2>(), mass);

  const Effectiveness sw =
      effectiveness(att, 0.0, alpha, airspeed, aero, switched_cfg.flags.drag_term);
  const double drag_slope = switched_cfg.flags.drag_term ? aero.drag_slope(alpha, airspeed) : 0.0;
  const Mat2 reduced =
      reduced_effectiveness(sw, SwitchAxis::YZ, switched_cfg.literal_yz, att, drag_slope);
  const Eigen::VectorXd du_sw =
      allocate(reduced, accel_demand.tail<2>(), switched_cfg.axis_weights.tail<2>(),
               switched_cfg.actuator_weights.tail<2>(), mass);
  // yz columns are (pitch, thrust), so roll keeps its current value
  const Vec3 switched_increment(0.0, du_sw[0], du_sw[1]);
  return {std::abs(du_base[0]), std::abs(switched_increment[0])};
}

}  // namespace orosoar
