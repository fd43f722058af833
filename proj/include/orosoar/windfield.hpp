// Orographic wind environment: an analytic ramp-updraft field, a loader for
// gridded fields, and the excess-updraft feasibility map.
#pragma once

#include "orosoar/aero.hpp"
#include "orosoar/geometry.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace orosoar {

struct WindSample {
  Vec3 velocity = Vec3::Zero();  // (u, v, w) NED, m/s
  bool extrapolated = false;     // query was outside the field's data hull
};

/// Immutable after construction; safe for concurrent reads.
class WindField {
 public:
  virtual ~WindField() = default;

  /// `time` is reserved for gust models; all shipped fields are steady.
  virtual WindSample sample(const Vec3& position, double time = 0.0) const = 0;

  /// Terrain surface altitude (m, positive up) under (x, y).
  virtual double terrain_altitude(double x, double y) const = 0;

  /// Whether `position` lies in the region where the field is meaningful.
  /// Leaving it ends a soaring run.
  virtual bool contains(const Vec3& position) const = 0;

  virtual double nominal_speed() const = 0;

  /// Yaw that points the nose into the free stream.
  virtual double upwind_heading() const = 0;
};

using WindFieldPtr = std::shared_ptr<const WindField>;

/// Analytic stand-in for a CFD field over a single inclined ramp.
///
/// Terrain: flat floor, a plane rising at `slope_angle` from `ramp_start_x`
/// over `ramp_length` (measured along the slope), then a plateau at crest
/// height. The free stream blows along +x.
///
/// With h the height above terrain, g(x) the speed-up profile (0 upstream,
/// linear to 1 at the crest, exponential relaxation downstream) and m(x) the
/// updraft mask (smoothstep blend ahead of the ramp, 1 on the slope, same
/// relaxation past the crest):
///   U(x, h) = U_inf (1 + k g(x) e^{-h/h_d})
///   w_up    = U(x, h) sin(slope) m(x) e^{-h/h_d}
///   u       = sqrt(U^2 - w_up^2)
/// so the flow is surface-parallel at the slope surface and the speed is U.
/// Outside |y| <= ramp_width/2 the whole vector fades to zero over
/// `edge_blend`.
struct RampFieldParams {
  double nominal_speed = 7.0;               // m/s
  double slope_angle = deg2rad(32.0);       // rad
  double ramp_start_x = 0.0;                // m
  double ramp_length = 2.4;                 // m, along the slope
  double ramp_width = 3.6;                  // m
  double updraft_decay_height = 1.5;        // m
  double speedup_factor = 0.3;
  double inflow_length = 0.6;               // m, updraft blend ahead of the ramp foot
  double wake_length = 1.0;                 // m, relaxation scale past the crest
  double edge_blend = 0.5;                  // m
  double upstream_extent = 3.0;             // m of field ahead of the ramp foot
  double downstream_extent = 3.0;           // m of field past the crest
  double ceiling = 4.5;                     // m, top of the field above the floor
};

class RampField final : public WindField {
 public:
  explicit RampField(const RampFieldParams& params);

  WindSample sample(const Vec3& position, double time = 0.0) const override;
  double terrain_altitude(double x, double y) const override;
  bool contains(const Vec3& position) const override;
  double nominal_speed() const override { return params_.nominal_speed; }
  double upwind_heading() const override;

  const RampFieldParams& params() const { return params_; }
  double crest_x() const { return crest_x_; }
  double crest_altitude() const { return crest_alt_; }

 private:
  RampFieldParams params_;
  double crest_x_;
  double crest_alt_;
};

/// Rectilinear lattice of wind samples with multilinear interpolation. 2-D
/// lattices (no y column) are y-invariant. Terrain is the lowest lattice
/// plane.
class GridField final : public WindField {
 public:
  GridField(std::vector<double> xs, std::vector<double> ys, std::vector<double> zs,
            std::vector<Vec3> values);

  WindSample sample(const Vec3& position, double time = 0.0) const override;
  double terrain_altitude(double x, double y) const override;
  bool contains(const Vec3& position) const override;
  double nominal_speed() const override { return nominal_speed_; }
  double upwind_heading() const override;

  bool is_planar() const { return ys_.size() == 1; }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  const std::vector<double>& zs() const { return zs_; }
  const Vec3& node(std::size_t ix, std::size_t iy, std::size_t iz) const;

 private:
  std::vector<double> xs_, ys_, zs_;
  std::vector<Vec3> values_;  // index (iz * ny + iy) * nx + ix
  double nominal_speed_;
  Vec3 mean_flow_;
};

WindFieldPtr build_ramp_field(const RampFieldParams& params);

/// Level flat-floor field with constant wind (speed, 0, 0) over
/// x in [x_min, x_max], altitude [0, ceiling]. Planar.
WindFieldPtr build_uniform_field(double speed, double x_min, double x_max, double ceiling);

/// Evaluates the field; total function.
WindSample wind_at(const WindField& field, const Vec3& position, double time = 0.0);

/// Parses the grid CSV schema `x,y,z,u,v,w` (or `x,z,u,v,w` for 2-D fields).
/// Rows may come in any order; the lattice is inferred and must be complete.
WindFieldPtr load_grid_field(const std::filesystem::path& path);
WindFieldPtr parse_grid_field(std::istream& in, const std::string& source_name);

struct ExcessUpdraft {
  double value = 0.0;          // m/s; > 0 excessive updraft, < 0 insufficient
  bool out_of_envelope = false;
};

/// Upward wind minus the zero-thrust glide sink rate at a horizontal airspeed
/// equal to the local horizontal wind speed. Zero exactly where a glider can
/// hold position without thrust. When the local wind is too slow to fly the
/// sink rate at stall is used and the value is flagged.
ExcessUpdraft excess_updraft(const WindField& field, const AeroModel& aero, const Vec3& position);

struct FeasibilityGrid {
  double x_min, x_max, z_min, z_max;  // z is NED
  int nx, nz;
  double y = 0.0;
};

struct FeasibilityPoint {
  double x, z, excess_updraft;
  bool out_of_envelope;
};

std::vector<FeasibilityPoint> feasibility_map(const WindField& field, const AeroModel& aero,
                                              const FeasibilityGrid& grid);

/// CSV `x,z,excess_updraft`.
void write_feasibility_csv(std::ostream& out, const std::vector<FeasibilityPoint>& points);

}  // namespace orosoar
