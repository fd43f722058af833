// Lift and drag model with an explicit stall region.
//
// Sign conventions (fixed repo-wide):
//   lift_force  L(alpha, V) = -q S CL(alpha)   (negative = upward in NED for CL > 0)
//   drag_force  D(alpha, V) = +q S CD(alpha)   (magnitude; the drag vector is
//                                              -D along the body heading)
//   lift_slope  = dL/dalpha,  drag_slope = dD/dalpha
// with q = rho V^2 / 2.
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace orosoar {

/// Value and alpha-derivative of an aerodynamic coefficient. `clamped` is set
/// when alpha was outside the valid range and was clamped to its edge.
struct CoefficientSample {
  double value = 0.0;
  double slope = 0.0;
  bool clamped = false;
};

struct LiftKnot {
  double alpha;  // rad
  double cl;
};

struct LiftCurveParams {
  double cl0 = 0.4;
  double cl_alpha = 5.0;       // 1/rad
  double alpha_stall = 0.0;    // rad, location of the CL peak
  double junction_alpha = 0.0; // rad, end of the linear region
  double cl_max = 0.0;         // CL at alpha_stall
  double alpha_min = 0.0;      // rad, lower edge of the valid range
  std::vector<LiftKnot> post_stall;  // strictly after alpha_stall, decreasing CL
};

/// Linear lift slope joined C1 to a monotone cubic Hermite spline that peaks
/// at alpha_stall and decays through the post-stall knots.
class LiftCurve {
 public:
  explicit LiftCurve(LiftCurveParams params);

  CoefficientSample operator()(double alpha) const;

  const LiftCurveParams& params() const { return params_; }
  double alpha_min() const { return params_.alpha_min; }
  double alpha_max_valid() const { return knots_.back().alpha; }
  double zero_lift_alpha() const { return -params_.cl0 / params_.cl_alpha; }

 private:
  struct HermiteKnot {
    double alpha;
    double cl;
    double slope;
  };
  LiftCurveParams params_;
  std::vector<HermiteKnot> knots_;  // junction, stall, post-stall...
};

struct DragCurveParams {
  double cd0 = 0.03;
  double induced_factor = 0.06;   // CD += k CL^2
  double stall_rise = 8.0;        // CD += k_s (alpha - alpha_stall)^2 past stall, 1/rad^2
};

struct AeroParams {
  double mass = 0.716;          // kg
  double wing_area = 0.18;      // m^2
  double air_density = 1.225;   // kg/m^3
  double alpha_max = 0.0;       // rad, operational AoA ceiling (<= alpha_stall)
  LiftCurveParams lift;
  DragCurveParams drag;
};

/// Steady zero-thrust glide at a given horizontal airspeed.
struct GlideTrim {
  double alpha;       // rad
  double sink_rate;   // m/s, positive down
  double glide_angle; // rad
};

class AeroModel {
 public:
  explicit AeroModel(const AeroParams& params);

  CoefficientSample cl(double alpha) const { return lift_(alpha); }
  CoefficientSample cd(double alpha) const;

  double dynamic_pressure(double airspeed) const {
    return 0.5 * params_.air_density * airspeed * airspeed;
  }
  double lift_force(double alpha, double airspeed) const;
  double drag_force(double alpha, double airspeed) const;
  double lift_slope(double alpha, double airspeed) const;
  double drag_slope(double alpha, double airspeed) const;

  /// Zero-thrust steady glide with the given horizontal airspeed, solved on the
  /// pre-stall branch. Empty when even CL at stall cannot carry the weight.
  std::optional<GlideTrim> glide_trim(double horizontal_airspeed) const;

  double mass() const { return params_.mass; }
  double wing_area() const { return params_.wing_area; }
  double air_density() const { return params_.air_density; }
  double alpha_max() const { return params_.alpha_max; }
  double alpha_stall() const { return params_.lift.alpha_stall; }
  const LiftCurve& lift_curve() const { return lift_; }
  const AeroParams& params() const { return params_; }

 private:
  AeroParams params_;
  LiftCurve lift_;
};

/// Airframe: aerodynamics plus the propulsion limit.
struct Aircraft {
  std::string name;
  double wingspan = 0.0;  // m, informational
  double max_thrust = 0.0;  // N
  AeroModel aero;
};

}  // namespace orosoar
