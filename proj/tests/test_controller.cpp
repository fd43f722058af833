#include "doctest.h"

#include "oracles.hpp"

#include "orosoar/allocation.hpp"
#include "orosoar/config.hpp"
#include "orosoar/controller.hpp"

#include <cmath>
#include <random>

using namespace orosoar;

namespace {

const Aircraft& eclipson() {
  static const Aircraft ac = aircraft_preset("eclipson_c");
  return ac;
}

struct Scenario {
  SimState state;
  Vec3 wind;
  AirState air;
  Vec3 accel;
};

// Hovering into a 7 m/s wind near zero thrust.
Scenario hover(const Vec3& offset, double thrust = 0.0) {
  Scenario s;
  s.state.position = Vec3(1.0, 0.0, -3.0) + offset;
  s.state.attitude = {0.0, deg2rad(3.0), std::numbers::pi};
  s.state.thrust = thrust;
  s.wind = Vec3(7.0, 0.0, -1.0);
  s.air = air_state(s.state, s.wind);
  s.accel = total_acceleration(s.state, s.air, eclipson().aero, s.wind);
  return s;
}

}  // namespace

TEST_CASE("desired acceleration") {
  ControllerConfig cfg;
  cfg.kp = Vec3(1.0, 1.0, 1.0);
  SimState s;
  CHECK(desired_acceleration(Vec3::Zero(), s, Vec3::Zero(), cfg) == Vec3::Zero());
  CHECK(desired_acceleration(Vec3(1.0, 0.0, 0.0), s, Vec3::Zero(), cfg) == Vec3(1.0, 0.0, 0.0));
  CHECK(desired_acceleration(Vec3(100.0, -100.0, 0.0), s, Vec3::Zero(), cfg) == Vec3(6.0, -6.0, 0.0));
  s.velocity = Vec3(0.0, 0.0, 2.0);
  const Vec3 d = desired_acceleration(Vec3::Zero(), s, Vec3(0.0, 0.0, 1.0), cfg);
  CHECK(d.z() == doctest::Approx(-cfg.kd.z() * 2.0 - 1.0));
}

TEST_CASE("zero-attitude effectiveness matrices") {
  const Attitude level{0.0, 0.0, 0.0};
  const double t = 2.5, l = -6.0, la = -30.0, da = 1.7;
  Mat3 gt;
  gt << 0, 0, 1, 0, 0, 0, 0, -t, 0;
  Mat3 gl;
  gl << 0, 0, 0, -l, 0, 0, 0, la, 0;
  Mat3 gd;
  gd << 0, -da, 0, 0, 0, 0, 0, 0, 0;
  CHECK(g_thrust(level, t) == gt);
  CHECK(g_lift(level, l, la) == gl);
  CHECK(g_drag(level, da) == gd);
}

TEST_CASE("effectiveness matches finite differences of the simplified force model") {
  const AeroModel& aero = eclipson().aero;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> roll(-0.5, 0.5), pitch(-0.3, 0.3),
      yaw(-std::numbers::pi, std::numbers::pi), thrust(0.0, 5.0), alpha(deg2rad(-5.0), deg2rad(7.5)),
      speed(4.0, 12.0);
  for (int i = 0; i < 50; ++i) {
    const Attitude att{roll(rng), pitch(rng), yaw(rng)};
    const double t = thrust(rng), a = alpha(rng), v = speed(rng);
    const Mat3 g = effectiveness(att, t, a, v, aero, true).sum();
    const Mat3 fd = oracle::force_jacobian(att, t, a, v, aero);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        if (g(r, c) == 0.0) {
          CHECK(std::abs(fd(r, c)) < 1e-8);
        } else {
          CHECK(std::abs(g(r, c) - fd(r, c)) <= 1e-5 * std::max(std::abs(fd(r, c)), 1e-4));
        }
      }
    }
  }
}

TEST_CASE("reduced matrices") {
  const AeroModel& aero = eclipson().aero;
  const Attitude level{0.0, 0.0, 0.0};
  const double a = 0.05, v = 8.0;
  const Effectiveness g = effectiveness(level, 0.0, a, v, aero, true);
  const double l = aero.lift_force(a, v), la = aero.lift_slope(a, v), da = aero.drag_slope(a, v);

  Mat2 xy;
  xy << 0, -da, -l, 0;
  CHECK(reduced_effectiveness(g, SwitchAxis::XY, false, level, da) == xy);
  Mat2 yz;
  yz << 0, 0, la, 0;
  CHECK(reduced_effectiveness(g, SwitchAxis::YZ, false, level, da) == yz);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ang(-0.6, 0.6), yaw(-3.1, 3.1);
  for (int i = 0; i < 100; ++i) {
    const Attitude att{ang(rng), ang(rng), yaw(rng)};
    const Effectiveness e = effectiveness(att, 1.5, a, v, aero, true);
    const Mat3 sum = e.sum();
    CHECK(reduced_effectiveness(e, SwitchAxis::XY, false, att, da) == sum.block<2, 2>(0, 0));
    const Mat2 sub = reduced_effectiveness(e, SwitchAxis::YZ, false, att, da);
    CHECK(sub == sum.block<2, 2>(1, 1));
    Mat2 diff = reduced_effectiveness(e, SwitchAxis::YZ, true, att, da) - sub;
    CHECK(diff(1, 0) == doctest::Approx(std::sin(att.yaw) * da));
    diff(1, 0) = 0.0;
    CHECK(diff.isZero(0.0));
  }
}

TEST_CASE("AoA pitch limiter") {
  CHECK(rad2deg(limit_pitch_by_aoa(deg2rad(10.0), deg2rad(14.0), deg2rad(5.0), deg2rad(12.0))) ==
        doctest::Approx(3.0));
  CHECK(limit_pitch_by_aoa(0.1, 0.0, 0.05, 0.2) == 0.1);
  CHECK(limit_pitch_by_aoa(-0.2, 0.19, 0.0, 0.2) == -0.2);
}

TEST_CASE("allocator basics") {
  const Eigen::Matrix3d eye = Eigen::Matrix3d::Identity();
  const Eigen::VectorXd du =
      allocate(eye, Vec3(1, 0, 0), Vec3::Ones(), Vec3::Constant(1e-6), 1.0);
  CHECK((du - Eigen::Vector3d(1, 0, 0)).norm() < 1e-5);
  CHECK(allocate(eye, Vec3::Zero(), Vec3::Ones(), Vec3::Ones(), 1.0).isZero(0.0));
  // rank deficient matrices are still well posed
  Eigen::Matrix3d singular = Eigen::Matrix3d::Zero();
  singular(0, 0) = 1.0;
  CHECK(allocate(singular, Vec3(1, 1, 1), Vec3::Ones(), Vec3::Constant(0.1), 1.0).allFinite());
  CHECK_THROWS_AS(allocate(eye, Vec3(1, 0, 0), Vec3(1, 0, 1), Vec3::Ones(), 1.0), ConfigError);
  CHECK_THROWS_AS(allocate(eye, Eigen::Vector2d(1, 0), Eigen::Vector2d::Ones(), Vec3::Ones(), 1.0),
                  ConfigError);
}

TEST_CASE("allocator matches a stacked QR least-squares solve") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 5.0);
  std::uniform_real_distribution<double> w(0.05, 3.0);
  for (int i = 0; i < 100; ++i) {
    Eigen::Matrix3d g;
    for (int k = 0; k < 9; ++k) g.data()[k] = n(rng);
    const Vec3 demand(n(rng), n(rng), n(rng)), wa(w(rng), w(rng), w(rng)), wu(w(rng), w(rng), w(rng));
    const Eigen::VectorXd du = allocate(g, demand, wa, wu, 0.7);
    const Eigen::VectorXd ref = oracle::stacked_lsq(g, demand, wa, wu, 0.7);
    CHECK((du - ref).norm() <= 1e-9 * std::max(1.0, ref.norm()));
  }
}

TEST_CASE("preset flags") {
  CHECK(controller_preset("base").flags == ControllerFlags{});
  CHECK(controller_preset("aos-a").flags == ControllerFlags{true, false, false, false});
  CHECK(controller_preset("aos-d").flags == ControllerFlags{false, true, false, false});
  CHECK(controller_preset("aos-e").flags == ControllerFlags{false, true, true, false});
  CHECK(controller_preset("aos-sw").flags == ControllerFlags{false, false, false, true});
  CHECK(controller_preset("saos").flags == ControllerFlags{true, true, true, true});
  CHECK(controller_preset("saos").switch_axis == SwitchAxis::XY);
  CHECK_THROWS_AS(controller_preset("aos-x"), ConfigError);

  const GainSet indoor = gain_preset("indoor"), outdoor = gain_preset("outdoor");
  CHECK(indoor.kp.x() > indoor.kp.z());
  CHECK(outdoor.kp.x() < outdoor.kp.z());
}

TEST_CASE("switching off keeps three-axis allocation") {
  const ControllerConfig cfg = controller_preset("aos-e");
  for (double dx : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
    const Scenario s = hover(Vec3(dx, 0.0, 0.0));
    const ControlCommand c = control_step(Vec3(1.0, 0.0, -3.0), s.state, s.air, s.accel, eclipson(), cfg);
    CHECK(c.mode == AllocationMode::ThreeAxis);
  }
}

TEST_CASE("thrust saturation switches to the reduced allocation and throttle re-engages") {
  ControllerConfig cfg = controller_preset("saos");
  const Vec3 ref(1.0, 0.0, -3.0);

  // upstream of the reference (ahead, since the nose points to -x): needs backward acceleration
  const Scenario ahead = hover(Vec3(-1.0, 0.0, 0.0));
  const ControlCommand a = control_step(ref, ahead.state, ahead.air, ahead.accel, eclipson(), cfg);
  CHECK(a.diagnostics.unclamped_thrust <= 0.0);
  CHECK(a.mode == AllocationMode::ReducedXY);
  CHECK(a.command.thrust == 0.0);

  // downstream of the reference: forward acceleration needs thrust
  const Scenario behind = hover(Vec3(1.0, 0.0, 0.0));
  const ControlCommand b = control_step(ref, behind.state, behind.air, behind.accel, eclipson(), cfg);
  CHECK(b.mode == AllocationMode::ThreeAxis);
  CHECK(b.command.thrust > 0.0);
  CHECK(b.command.thrust == doctest::Approx(b.diagnostics.unclamped_thrust));

  cfg.switch_axis = SwitchAxis::YZ;
  const ControlCommand c = control_step(ref, ahead.state, ahead.air, ahead.accel, eclipson(), cfg);
  CHECK(c.mode == AllocationMode::ReducedYZ);
  CHECK(c.command.thrust == 0.0);
  CHECK(c.command.roll == ahead.state.attitude.roll);
}

TEST_CASE("switch soundness and actuator limits over random states") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> off(-2.0, 2.0), ang(-0.3, 0.3), thr(0.0, 2.0);
  for (const char* name : {"aos-sw", "saos"}) {
    const ControllerConfig cfg = controller_preset(name);
    for (int i = 0; i < 200; ++i) {
      Scenario s = hover(Vec3(off(rng), off(rng), off(rng)), thr(rng));
      s.state.attitude.roll = ang(rng);
      s.state.attitude.pitch = ang(rng);
      s.air = air_state(s.state, s.wind);
      const ControlCommand c =
          control_step(Vec3(1.0, 0.0, -3.0), s.state, s.air, s.accel, eclipson(), cfg);
      if (c.mode != AllocationMode::ThreeAxis) {
        CHECK(c.command.thrust == 0.0);
        CHECK(c.diagnostics.unclamped_thrust <= cfg.switch_threshold);
      } else {
        CHECK(c.diagnostics.unclamped_thrust > cfg.switch_threshold);
      }
      CHECK(std::abs(c.command.roll) <= cfg.roll_max);
      CHECK(c.command.pitch <= cfg.pitch_ceiling);
      CHECK(c.command.pitch >= -cfg.pitch_floor);
      CHECK(c.command.thrust <= eclipson().max_thrust);
    }
  }
}

TEST_CASE("AoA limit caps the pitch command") {
  const ControllerConfig cfg = controller_preset("aos-a");
  Scenario s = hover(Vec3(0.0, 0.0, 1.5));  // below the reference: wants to pitch up
  s.wind = Vec3(7.0, 0.0, -2.0);
  s.air = air_state(s.state, s.wind);
  REQUIRE(s.air.alpha > eclipson().aero.alpha_max() - 0.05);
  const ControlCommand c = control_step(Vec3(1.0, 0.0, -3.0), s.state, s.air, s.accel, eclipson(), cfg);
  CHECK(c.command.pitch - s.state.attitude.pitch <= eclipson().aero.alpha_max() - s.air.alpha + 1e-12);

  // the alpha used by the force model follows the flag
  const ControlCommand base = control_step(Vec3(1.0, 0.0, -3.0), s.state, s.air, s.accel, eclipson(),
                                           controller_preset("base"));
  CHECK(base.diagnostics.alpha_used == s.state.attitude.pitch);
  const ControlCommand e = control_step(Vec3(1.0, 0.0, -3.0), s.state, s.air, s.accel, eclipson(),
                                        controller_preset("aos-e"));
  CHECK(e.diagnostics.alpha_used == s.air.alpha);
}

TEST_CASE("unreliable alpha falls back to the pitch ceiling and the pitch estimate") {
  const ControllerConfig cfg = controller_preset("saos");
  Scenario s = hover(Vec3(0.0, 0.0, 1.5));
  s.air.alpha_reliable = false;
  const ControlCommand c = control_step(Vec3(1.0, 0.0, -3.0), s.state, s.air, s.accel, eclipson(), cfg);
  CHECK(c.diagnostics.alpha_used == s.state.attitude.pitch);
  CHECK(c.command.pitch <= cfg.pitch_ceiling);
}

TEST_CASE("measured-acceleration low-pass") {
  ControllerConfig cfg = controller_preset("base");
  cfg.accel_filter_cutoff = 2.0;
  Controller filtered(cfg, eclipson(), 0.02);
  Controller raw(controller_preset("base"), eclipson(), 0.02);
  const Scenario s = hover(Vec3::Zero());
  filtered.update(Vec3(1.0, 0.0, -3.0), s.state, s.air, Vec3::Zero());
  raw.update(Vec3(1.0, 0.0, -3.0), s.state, s.air, Vec3::Zero());
  const Vec3 jump(0.0, 0.0, 3.0);
  const auto f = filtered.update(Vec3(1.0, 0.0, -3.0), s.state, s.air, jump);
  const auto r = raw.update(Vec3(1.0, 0.0, -3.0), s.state, s.air, jump);
  // the filtered controller sees only part of the jump
  CHECK(std::abs(f.diagnostics.accel_demand.z()) < std::abs(r.diagnostics.accel_demand.z()));
}

TEST_CASE("roll coupling at small yaw") {
  const AeroModel& aero = eclipson().aero;
  const ControllerConfig base = controller_preset("base");
  ControllerConfig yz = controller_preset("saos");
  yz.switch_axis = SwitchAxis::YZ;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> speed(5.0, 12.0);
  const Attitude att{0.0, deg2rad(3.0), 0.05};
  for (int i = 0; i < 20; ++i) {
    const auto p = roll_coupling_diagnostic(att, deg2rad(6.0), speed(rng), Vec3(1, 0, 0), aero, base, yz);
    CHECK(p.base_roll > p.switched_roll);
    CHECK(p.switched_roll == 0.0);
  }
  const auto at_zero =
      roll_coupling_diagnostic({0.0, 0.05, 0.0}, 0.1, 8.0, Vec3(1, 0, 0), aero, base, yz);
  CHECK(at_zero.switched_roll == 0.0);

  ControllerConfig x_heavy = base;
  x_heavy.axis_weights.x() = 10.0;
  const auto lo = roll_coupling_diagnostic(att, 0.1, 8.0, Vec3(1, 0, 0), aero, base, yz);
  const auto hi = roll_coupling_diagnostic(att, 0.1, 8.0, Vec3(1, 0, 0), aero, x_heavy, yz);
  CHECK(hi.base_roll > lo.base_roll);
  CHECK(hi.switched_roll == 0.0);
}
