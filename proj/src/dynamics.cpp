#include "orosoar/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace orosoar {

AirState air_state(const SimState& state, const Vec3& wind, double min_sensor_airspeed) {
  const Vec3 v_air = state.velocity - wind;
  const Vec3 v_body = body_to_ned(state.attitude).transpose() * v_air;
  AirState air;
  air.airspeed = v_air.norm();
  air.alpha = std::atan2(v_body.z(), v_body.x());
  air.beta = air.airspeed > 0.0 ? std::asin(std::clamp(v_body.y() / air.airspeed, -1.0, 1.0)) : 0.0;
  air.reversed_flow = v_body.x() <= 0.0;
  air.alpha_reliable = air.airspeed >= min_sensor_airspeed;
  return air;
}

Vec3 total_acceleration(const SimState& state, const AirState& air, const AeroModel& aero,
                        const Vec3& wind) {
  const Mat3 r = body_to_ned(state.attitude);
  Vec3 force = state.thrust * r.col(0);
  const double v = air.airspeed;
  if (v > 1e-9) {
    const Vec3 v_hat = (state.velocity - wind) / v;
    const double qs = aero.dynamic_pressure(v) * aero.wing_area();
    force -= qs * aero.cd(air.alpha).value * v_hat;
    Vec3 normal = r.col(2) - r.col(2).dot(v_hat) * v_hat;
    const double n = normal.norm();
    if (n > 1e-12) force -= qs * aero.cl(air.alpha).value * (normal / n);
  }
  return Vec3(0.0, 0.0, kGravity) + force / aero.mass();
}

Vec3 simplified_acceleration(const Attitude& att, double thrust, double alpha, double airspeed,
                             const AeroModel& aero) {
  const double cphi = std::cos(att.roll), sphi = std::sin(att.roll);
  const double cth = std::cos(att.pitch), sth = std::sin(att.pitch);
  const double cpsi = std::cos(att.yaw), spsi = std::sin(att.yaw);
  const double lift = aero.lift_force(alpha, airspeed);
  const double drag = aero.drag_force(alpha, airspeed);
  const Vec3 thrust_n(thrust * (cth * cpsi - sphi * sth * spsi),
                      thrust * (cth * spsi + sphi * sth * cpsi), -thrust * cphi * sth);
  const Vec3 lift_n(sphi * spsi * lift, -sphi * cpsi * lift, cphi * lift);
  const Vec3 drag_n(-cpsi * drag, -spsi * drag, 0.0);
  return Vec3(0.0, 0.0, kGravity) + (thrust_n + lift_n + drag_n) / aero.mass();
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::None: return "none";
    case Termination::AttitudeEnvelope: return "attitude_envelope";
    case Termination::TerrainContact: return "terrain_contact";
    case Termination::NonFinite: return "non_finite";
  }
  return "unknown";
}

namespace {

struct Derivative {
  Vec3 position;
  Vec3 velocity;
  double roll, pitch, thrust;
};

double lag_rate(double command, double actual, double tau, double limit) {
  return std::clamp((command - actual) / tau, -limit, limit);
}

Derivative evaluate(const SimState& s, const ActuatorCommand& cmd, const WindField& field,
                    const AeroModel& aero, const InnerLoopModel& inner) {
  const Vec3 wind = field.sample(s.position, s.time).velocity;
  const AirState air = air_state(s, wind);
  Derivative d;
  d.position = s.velocity;
  d.velocity = total_acceleration(s, air, aero, wind);
  d.roll = lag_rate(cmd.roll, s.attitude.roll, inner.attitude_time_constant,
                    inner.attitude_rate_limit);
  d.pitch = lag_rate(cmd.pitch, s.attitude.pitch, inner.attitude_time_constant,
                     inner.attitude_rate_limit);
  d.thrust = (cmd.thrust - s.thrust) / inner.thrust_time_constant;
  return d;
}

SimState advance(const SimState& s, const Derivative& d, double h) {
  SimState out = s;
  out.position += h * d.position;
  out.velocity += h * d.velocity;
  out.attitude.roll += h * d.roll;
  out.attitude.pitch += h * d.pitch;
  out.thrust += h * d.thrust;
  out.time += h;
  return out;
}

}  // namespace

StepResult step(const SimState& state, const ActuatorCommand& command, const WindField& field,
                const AeroModel& aero, const InnerLoopModel& inner, double dt) {
  if (!(dt > 0.0 && dt <= 0.05)) throw ConfigError("step: dt must lie in (0, 0.05]");
  const Derivative k1 = evaluate(state, command, field, aero, inner);
  const Derivative k2 = evaluate(advance(state, k1, 0.5 * dt), command, field, aero, inner);
  const Derivative k3 = evaluate(advance(state, k2, 0.5 * dt), command, field, aero, inner);
  const Derivative k4 = evaluate(advance(state, k3, dt), command, field, aero, inner);

  StepResult result;
  SimState& s = result.state;
  s = state;
  const double w = dt / 6.0;
  s.position += w * (k1.position + 2.0 * k2.position + 2.0 * k3.position + k4.position);
  s.velocity += w * (k1.velocity + 2.0 * k2.velocity + 2.0 * k3.velocity + k4.velocity);
  s.attitude.roll += w * (k1.roll + 2.0 * k2.roll + 2.0 * k3.roll + k4.roll);
  s.attitude.pitch += w * (k1.pitch + 2.0 * k2.pitch + 2.0 * k3.pitch + k4.pitch);
  s.thrust += w * (k1.thrust + 2.0 * k2.thrust + 2.0 * k3.thrust + k4.thrust);
  s.thrust = std::max(0.0, s.thrust);
  s.time = state.time + dt;

  const bool finite = s.position.allFinite() && s.velocity.allFinite() &&
                      std::isfinite(s.attitude.roll) && std::isfinite(s.attitude.pitch) &&
                      std::isfinite(s.thrust);
  if (!finite) {
    result.termination = Termination::NonFinite;
  } else if (std::abs(s.attitude.roll) >= std::numbers::pi / 2 ||
             std::abs(s.attitude.pitch) >= std::numbers::pi / 2) {
    result.termination = Termination::AttitudeEnvelope;
  } else if (-s.position.z() < field.terrain_altitude(s.position.x(), s.position.y())) {
    result.termination = Termination::TerrainContact;
  }
  return result;
}

}  // namespace orosoar
