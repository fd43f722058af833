#include "orosoar/aero.hpp"

#include "orosoar/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace orosoar {

namespace {

// Fritsch-Carlson style slope at an interior knot of monotone data.
double monotone_slope(double left_secant, double right_secant) {
  if (left_secant * right_secant <= 0.0) return 0.0;
  return 2.0 / (1.0 / left_secant + 1.0 / right_secant);
}

}  // namespace

LiftCurve::LiftCurve(LiftCurveParams params) : params_(std::move(params)) {
  const auto& p = params_;
  if (!(p.cl_alpha > 0.0)) throw ConfigError("lift curve: cl_alpha must be positive");
  if (!(p.alpha_min < p.junction_alpha && p.junction_alpha < p.alpha_stall)) {
    throw ConfigError("lift curve: require alpha_min < junction_alpha < alpha_stall");
  }
  if (p.alpha_min > -p.cl0 / p.cl_alpha) {
    throw ConfigError("lift curve: valid range must include the zero-lift angle");
  }
  const double cl_junction = p.cl0 + p.cl_alpha * p.junction_alpha;
  const double secant = (p.cl_max - cl_junction) / (p.alpha_stall - p.junction_alpha);
  // Hermite segment with end slopes (cl_alpha, 0) is strictly increasing and
  // peaks at its right end iff the secant exceeds cl_alpha / 3.
  if (!(secant > p.cl_alpha / 3.0)) {
    throw ConfigError("lift curve: cl_max too low for a monotone rise to stall");
  }
  if (p.post_stall.empty()) throw ConfigError("lift curve: post-stall knots required");

  knots_.push_back({p.junction_alpha, cl_junction, p.cl_alpha});
  knots_.push_back({p.alpha_stall, p.cl_max, 0.0});
  for (const auto& k : p.post_stall) {
    const auto& prev = knots_.back();
    if (!(k.alpha > prev.alpha) || !(k.cl < prev.cl)) {
      throw ConfigError("lift curve: post-stall knots must increase in alpha and decrease in CL");
    }
    knots_.push_back({k.alpha, k.cl, 0.0});
  }
  for (std::size_t i = 2; i < knots_.size(); ++i) {
    const double left = (knots_[i].cl - knots_[i - 1].cl) / (knots_[i].alpha - knots_[i - 1].alpha);
    if (i + 1 < knots_.size()) {
      const double right =
          (knots_[i + 1].cl - knots_[i].cl) / (knots_[i + 1].alpha - knots_[i].alpha);
      knots_[i].slope = monotone_slope(left, right);
    } else {
      knots_[i].slope = left;
    }
  }
}

CoefficientSample LiftCurve::operator()(double alpha) const {
  CoefficientSample out;
  if (alpha < params_.alpha_min) {
    alpha = params_.alpha_min;
    out.clamped = true;
  } else if (alpha > knots_.back().alpha) {
    alpha = knots_.back().alpha;
    out.clamped = true;
  }
  if (alpha <= params_.junction_alpha) {
    out.value = params_.cl0 + params_.cl_alpha * alpha;
    out.slope = out.clamped ? 0.0 : params_.cl_alpha;
    return out;
  }
  auto it = std::upper_bound(knots_.begin(), knots_.end(), alpha,
                             [](double a, const HermiteKnot& k) { return a < k.alpha; });
  if (it == knots_.end()) --it;
  const HermiteKnot& k0 = *(it - 1);
  const HermiteKnot& k1 = *it;
  const double h = k1.alpha - k0.alpha;
  const double t = (alpha - k0.alpha) / h;
  const double t2 = t * t, t3 = t2 * t;
  out.value = (2 * t3 - 3 * t2 + 1) * k0.cl + (t3 - 2 * t2 + t) * h * k0.slope +
              (-2 * t3 + 3 * t2) * k1.cl + (t3 - t2) * h * k1.slope;
  out.slope = out.clamped ? 0.0
                          : (6 * t2 - 6 * t) / h * k0.cl + (3 * t2 - 4 * t + 1) * k0.slope +
                                (-6 * t2 + 6 * t) / h * k1.cl + (3 * t2 - 2 * t) * k1.slope;
  return out;
}

AeroModel::AeroModel(const AeroParams& params) : params_(params), lift_(params.lift) {
  if (!(params_.mass > 0.0)) throw ConfigError("aero: mass must be positive");
  if (!(params_.wing_area > 0.0)) throw ConfigError("aero: wing_area must be positive");
  if (!(params_.air_density > 0.0)) throw ConfigError("aero: air_density must be positive");
  if (!(params_.drag.cd0 > 0.0)) throw ConfigError("aero: cd0 must be positive");
  if (params_.drag.induced_factor < 0.0 || params_.drag.stall_rise < 0.0) {
    throw ConfigError("aero: drag factors must be non-negative");
  }
  if (!(params_.alpha_max <= params_.lift.alpha_stall)) {
    throw ConfigError("aero: alpha_max must not exceed alpha_stall");
  }
}

CoefficientSample AeroModel::cd(double alpha) const {
  const CoefficientSample lift = lift_(alpha);
  const auto& d = params_.drag;
  const double a = std::clamp(alpha, lift_.alpha_min(), lift_.alpha_max_valid());
  const double past = std::max(0.0, a - params_.lift.alpha_stall);
  CoefficientSample out;
  out.clamped = lift.clamped;
  out.value = d.cd0 + d.induced_factor * lift.value * lift.value + d.stall_rise * past * past;
  out.slope = out.clamped ? 0.0
                          : 2.0 * d.induced_factor * lift.value * lift.slope + 2.0 * d.stall_rise * past;
  return out;
}

double AeroModel::lift_force(double alpha, double airspeed) const {
  return -dynamic_pressure(airspeed) * params_.wing_area * cl(alpha).value;
}

double AeroModel::drag_force(double alpha, double airspeed) const {
  return dynamic_pressure(airspeed) * params_.wing_area * cd(alpha).value;
}

double AeroModel::lift_slope(double alpha, double airspeed) const {
  return -dynamic_pressure(airspeed) * params_.wing_area * cl(alpha).slope;
}

double AeroModel::drag_slope(double alpha, double airspeed) const {
  return dynamic_pressure(airspeed) * params_.wing_area * cd(alpha).slope;
}

std::optional<GlideTrim> AeroModel::glide_trim(double horizontal_airspeed) const {
  if (!(horizontal_airspeed > 0.0)) return std::nullopt;
  const double qs = dynamic_pressure(horizontal_airspeed) * params_.wing_area;
  const double weight = params_.mass * kGravity;
  // Aerodynamic force magnitude carrying the weight, written in horizontal
  // dynamic pressure: qs (CL^2 + CD^2)^1.5 / CL^2 = m g.
  auto residual = [&](double alpha) {
    const double c_l = lift_(alpha).value;
    const double c_d = cd(alpha).value;
    return qs * std::pow(c_l * c_l + c_d * c_d, 1.5) / (c_l * c_l) - weight;
  };
  const double hi_alpha = params_.lift.alpha_stall;
  if (residual(hi_alpha) < 0.0) return std::nullopt;

  // The physical branch is the one where the residual grows with alpha; find
  // its lower end by scanning from stall toward zero lift.
  const double lo_limit = lift_.zero_lift_alpha() + 1e-4;
  constexpr int kScan = 200;
  double lo = hi_alpha;
  double prev = residual(hi_alpha);
  bool bracketed = false;
  for (int i = 1; i <= kScan; ++i) {
    const double a = hi_alpha + (lo_limit - hi_alpha) * i / kScan;
    const double r = residual(a);
    if (r <= 0.0) {
      lo = a;
      bracketed = true;
      break;
    }
    if (r > prev) break;  // passed the minimum without a sign change
    prev = r;
    lo = a;
  }
  if (!bracketed) return std::nullopt;

  double a_lo = lo, a_hi = hi_alpha;
  for (int i = 0; i < 100 && a_hi - a_lo > 1e-13; ++i) {
    const double mid = 0.5 * (a_lo + a_hi);
    (residual(mid) < 0.0 ? a_lo : a_hi) = mid;
  }
  const double alpha = 0.5 * (a_lo + a_hi);
  const double ratio = cd(alpha).value / lift_(alpha).value;
  return GlideTrim{alpha, horizontal_airspeed * ratio, std::atan(ratio)};
}

}  // namespace orosoar
