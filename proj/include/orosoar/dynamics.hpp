// Point-mass translational dynamics in NED with a first-order stand-in for
// the attitude/throttle inner loop, integrated with fixed-step RK4.
#pragma once

#include "orosoar/aero.hpp"
#include "orosoar/geometry.hpp"
#include "orosoar/windfield.hpp"

#include <string_view>

namespace orosoar {

struct SimState {
  Vec3 position = Vec3::Zero();  // m, NED
  Vec3 velocity = Vec3::Zero();  // m/s, NED (ground-relative)
  Attitude attitude;             // rad
  double thrust = 0.0;           // N, actual
  double time = 0.0;             // s
};

struct AirState {
  double airspeed = 0.0;  // m/s
  double alpha = 0.0;     // rad
  double beta = 0.0;      // rad
  bool reversed_flow = false;   // air arrives from behind (u_body <= 0)
  bool alpha_reliable = true;   // airspeed above the vane's minimum
};

struct InnerLoopModel {
  double attitude_time_constant = 0.15;          // s
  double thrust_time_constant = 0.1;             // s
  double attitude_rate_limit = deg2rad(120.0);   // rad/s
};

struct ActuatorCommand {
  double roll = 0.0;
  double pitch = 0.0;
  double thrust = 0.0;
};

/// Air-relative state. `min_sensor_airspeed` marks alpha as unreliable below
/// that airspeed.
AirState air_state(const SimState& state, const Vec3& wind, double min_sensor_airspeed = 1.0);

/// Acceleration of the simulated vehicle. Lift acts normal to the air-relative
/// velocity in the plane containing the body z axis, drag along it, thrust
/// along the body x axis.
Vec3 total_acceleration(const SimState& state, const AirState& air, const AeroModel& aero,
                        const Vec3& wind);

/// Force model the controller linearises: lift and drag keep the directions
/// they have at zero pitch and zero flow angle,
///   T_N = T (c.th c.psi - s.phi s.th s.psi,  c.th s.psi + s.phi s.th c.psi,  -c.phi s.th)
///   L_N = L (s.phi s.psi, -s.phi c.psi, c.phi)
///   D_N = -D (c.psi, s.psi, 0)
/// with L = lift_force (negative up) and D = drag_force (magnitude).
Vec3 simplified_acceleration(const Attitude& att, double thrust, double alpha, double airspeed,
                             const AeroModel& aero);

enum class Termination {
  None,
  AttitudeEnvelope,
  TerrainContact,
  NonFinite,
};

std::string_view to_string(Termination t);

struct StepResult {
  SimState state;
  Termination termination = Termination::None;
};

/// Advances by `dt` (0 < dt <= 0.05). Attitude and thrust follow the command
/// through rate-limited first-order lags; yaw is held. The wind is sampled at
/// every RK4 stage position. Deterministic.
StepResult step(const SimState& state, const ActuatorCommand& command, const WindField& field,
                const AeroModel& aero, const InnerLoopModel& inner, double dt);

}  // namespace orosoar
