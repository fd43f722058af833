#include "orosoar/windfield.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace orosoar {

namespace {

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

}  // namespace

// ---------------------------------------------------------------------------
// RampField

RampField::RampField(const RampFieldParams& params) : params_(params) {
  const auto& p = params_;
  if (!(p.nominal_speed > 0.0)) throw ConfigError("ramp field: nominal_speed must be positive");
  if (!(p.slope_angle > 0.0 && p.slope_angle < std::numbers::pi / 2)) {
    throw ConfigError("ramp field: slope_angle must lie in (0, pi/2)");
  }
  if (!(p.ramp_length > 0.0)) throw ConfigError("ramp field: ramp_length must be positive");
  if (!(p.ramp_width > 0.0)) throw ConfigError("ramp field: ramp_width must be positive");
  if (!(p.updraft_decay_height > 0.0)) {
    throw ConfigError("ramp field: updraft_decay_height must be positive");
  }
  if (!(p.speedup_factor >= 0.0)) throw ConfigError("ramp field: speedup_factor must be >= 0");
  if (!(p.inflow_length > 0.0 && p.wake_length > 0.0 && p.edge_blend > 0.0)) {
    throw ConfigError("ramp field: blend lengths must be positive");
  }
  crest_x_ = p.ramp_start_x + p.ramp_length * std::cos(p.slope_angle);
  crest_alt_ = p.ramp_length * std::sin(p.slope_angle);
  if (!(p.ceiling > crest_alt_)) throw ConfigError("ramp field: ceiling must be above the crest");
}

double RampField::terrain_altitude(double x, double /*y*/) const {
  if (x <= params_.ramp_start_x) return 0.0;
  if (x >= crest_x_) return crest_alt_;
  return (x - params_.ramp_start_x) * std::tan(params_.slope_angle);
}

WindSample RampField::sample(const Vec3& position, double /*time*/) const {
  const auto& p = params_;
  const double x = position.x();
  const double altitude = -position.z();
  const double height = std::max(0.0, altitude - terrain_altitude(x, position.y()));
  const double decay = std::exp(-height / p.updraft_decay_height);

  double speedup = 0.0;
  double mask = 0.0;
  double wake = 1.0;
  if (x < p.ramp_start_x) {
    mask = smoothstep((x - (p.ramp_start_x - p.inflow_length)) / p.inflow_length);
  } else if (x <= crest_x_) {
    speedup = (x - p.ramp_start_x) / (crest_x_ - p.ramp_start_x);
    mask = 1.0;
  } else {
    // relax from the crest values so neither component grows downstream
    speedup = 1.0;
    mask = 1.0;
    wake = std::exp(-(x - crest_x_) / p.wake_length);
  }

  const double speed = p.nominal_speed * (1.0 + p.speedup_factor * speedup * decay);
  double updraft = speed * std::sin(p.slope_angle) * mask * decay;
  double horizontal = std::sqrt(std::max(0.0, speed * speed - updraft * updraft));
  if (wake < 1.0) {
    horizontal = p.nominal_speed + std::max(0.0, horizontal - p.nominal_speed) * wake;
    updraft *= wake;
  }

  const double half_width = 0.5 * p.ramp_width;
  const double lateral_excess = std::abs(position.y()) - half_width;
  const double lateral = lateral_excess <= 0.0 ? 1.0 : 1.0 - smoothstep(lateral_excess / p.edge_blend);

  WindSample out;
  out.velocity = Vec3(horizontal, 0.0, -updraft) * lateral;
  return out;
}

bool RampField::contains(const Vec3& position) const {
  const auto& p = params_;
  const double x = position.x();
  const double altitude = -position.z();
  return x >= p.ramp_start_x - p.upstream_extent && x <= crest_x_ + p.downstream_extent &&
         std::abs(position.y()) <= 0.5 * p.ramp_width && altitude <= p.ceiling;
}

double RampField::upwind_heading() const { return std::numbers::pi; }

WindFieldPtr build_ramp_field(const RampFieldParams& params) {
  return std::make_shared<const RampField>(params);
}

WindFieldPtr build_uniform_field(double speed, double x_min, double x_max, double ceiling) {
  if (!(x_max > x_min) || !(ceiling > 0.0)) throw ConfigError("uniform field: empty extent");
  const Vec3 w(speed, 0.0, 0.0);
  return std::make_shared<const GridField>(std::vector<double>{x_min, x_max}, std::vector<double>{0.0},
                                           std::vector<double>{-ceiling, 0.0},
                                           std::vector<Vec3>(4, w));
}

WindSample wind_at(const WindField& field, const Vec3& position, double time) {
  return field.sample(position, time);
}

// ---------------------------------------------------------------------------
// GridField

GridField::GridField(std::vector<double> xs, std::vector<double> ys, std::vector<double> zs,
                     std::vector<Vec3> values)
    : xs_(std::move(xs)), ys_(std::move(ys)), zs_(std::move(zs)), values_(std::move(values)) {
  auto check_axis = [](const std::vector<double>& axis, const char* name) {
    if (axis.empty()) throw ConfigError(std::string("grid field: empty axis ") + name);
    for (std::size_t i = 1; i < axis.size(); ++i) {
      if (!(axis[i] > axis[i - 1])) {
        throw ConfigError(std::string("grid field: axis ") + name + " not strictly increasing");
      }
    }
  };
  check_axis(xs_, "x");
  check_axis(ys_, "y");
  check_axis(zs_, "z");
  if (values_.size() != xs_.size() * ys_.size() * zs_.size()) {
    throw ConfigError("grid field: value count does not match the lattice");
  }
  mean_flow_ = Vec3::Zero();
  for (const Vec3& v : values_) {
    if (!v.allFinite()) throw ConfigError("grid field: non-finite sample");
    mean_flow_ += v;
  }
  mean_flow_ /= static_cast<double>(values_.size());
  nominal_speed_ = mean_flow_.head<2>().norm();
}

const Vec3& GridField::node(std::size_t ix, std::size_t iy, std::size_t iz) const {
  return values_[(iz * ys_.size() + iy) * xs_.size() + ix];
}

namespace {

// Cell index and weight for one axis; clamps outside the hull.
struct AxisCoord {
  std::size_t i0, i1;
  double t;
  bool clamped;
};

AxisCoord locate(const std::vector<double>& axis, double q) {
  if (axis.size() == 1) return {0, 0, 0.0, q != axis.front()};
  if (q <= axis.front()) return {0, 1, 0.0, q < axis.front()};
  if (q >= axis.back()) return {axis.size() - 2, axis.size() - 1, 1.0, q > axis.back()};
  auto it = std::upper_bound(axis.begin(), axis.end(), q);
  const std::size_t i1 = static_cast<std::size_t>(it - axis.begin());
  const std::size_t i0 = i1 - 1;
  return {i0, i1, (q - axis[i0]) / (axis[i1] - axis[i0]), false};
}

}  // namespace

WindSample GridField::sample(const Vec3& position, double /*time*/) const {
  const AxisCoord cx = locate(xs_, position.x());
  const AxisCoord cz = locate(zs_, position.z());
  AxisCoord cy{0, 0, 0.0, false};
  if (!is_planar()) cy = locate(ys_, position.y());

  auto lerp_x = [&](std::size_t iy, std::size_t iz) -> Vec3 {
    return node(cx.i0, iy, iz) * (1.0 - cx.t) + node(cx.i1, iy, iz) * cx.t;
  };
  auto lerp_xy = [&](std::size_t iz) -> Vec3 {
    if (is_planar()) return lerp_x(0, iz);
    return lerp_x(cy.i0, iz) * (1.0 - cy.t) + lerp_x(cy.i1, iz) * cy.t;
  };
  WindSample out;
  if (zs_.size() == 1) {
    out.velocity = lerp_xy(0);
  } else {
    out.velocity = lerp_xy(cz.i0) * (1.0 - cz.t) + lerp_xy(cz.i1) * cz.t;
  }
  out.extrapolated = cx.clamped || cz.clamped || cy.clamped;
  return out;
}

double GridField::terrain_altitude(double /*x*/, double /*y*/) const { return -zs_.back(); }

bool GridField::contains(const Vec3& position) const {
  const bool in_x = position.x() >= xs_.front() && position.x() <= xs_.back();
  const bool in_y = is_planar() || (position.y() >= ys_.front() && position.y() <= ys_.back());
  const bool in_z = position.z() >= zs_.front() && position.z() <= zs_.back();
  return in_x && in_y && in_z;
}

double GridField::upwind_heading() const {
  if (mean_flow_.head<2>().norm() == 0.0) return 0.0;
  return wrap_angle(std::atan2(-mean_flow_.y(), -mean_flow_.x()));
}

// ---------------------------------------------------------------------------
// CSV loader

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& cell, const std::string& source, int line) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(source, line, "malformed number '" + cell + "'");
  }
  if (!std::isfinite(value)) throw ParseError(source, line, "non-finite value '" + cell + "'");
  return value;
}

}  // namespace

WindFieldPtr parse_grid_field(std::istream& in, const std::string& source) {
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    header = split_csv_line(line);
    break;
  }
  if (header.empty()) throw ParseError(source, std::max(line_no, 1), "missing header");

  const std::vector<std::string> planar{"x", "z", "u", "v", "w"};
  const std::vector<std::string> full{"x", "y", "z", "u", "v", "w"};
  bool has_y;
  if (header == full) {
    has_y = true;
  } else if (header == planar) {
    has_y = false;
  } else {
    throw ParseError(source, line_no, "expected header x,y,z,u,v,w or x,z,u,v,w");
  }
  const std::size_t columns = header.size();

  struct Row {
    double x, y, z;
    Vec3 v;
    int line;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != columns) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(columns) + " columns, got " +
                           std::to_string(cells.size()));
    }
    std::vector<double> vals;
    vals.reserve(columns);
    for (const auto& c : cells) vals.push_back(parse_number(c, source, line_no));
    Row r;
    r.line = line_no;
    if (has_y) {
      r.x = vals[0], r.y = vals[1], r.z = vals[2];
      r.v = Vec3(vals[3], vals[4], vals[5]);
    } else {
      r.x = vals[0], r.y = 0.0, r.z = vals[1];
      r.v = Vec3(vals[2], vals[3], vals[4]);
    }
    rows.push_back(r);
  }
  if (rows.empty()) throw ParseError(source, line_no, "empty lattice");

  auto unique_axis = [&](auto member) {
    std::vector<double> axis;
    for (const auto& r : rows) axis.push_back(r.*member);
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
    return axis;
  };
  std::vector<double> xs = unique_axis(&Row::x);
  std::vector<double> ys = unique_axis(&Row::y);
  std::vector<double> zs = unique_axis(&Row::z);
  const std::size_t expected = xs.size() * ys.size() * zs.size();

  std::vector<Vec3> values(expected);
  std::vector<int> seen(expected, 0);
  auto index_of = [](const std::vector<double>& axis, double q) {
    return static_cast<std::size_t>(std::lower_bound(axis.begin(), axis.end(), q) - axis.begin());
  };
  for (const auto& r : rows) {
    const std::size_t idx =
        (index_of(zs, r.z) * ys.size() + index_of(ys, r.y)) * xs.size() + index_of(xs, r.x);
    if (seen[idx]) throw ParseError(source, r.line, "duplicate lattice node");
    seen[idx] = r.line;
    values[idx] = r.v;
  }
  if (rows.size() != expected) {
    // Report the first missing node by coordinates.
    for (std::size_t iz = 0; iz < zs.size(); ++iz)
      for (std::size_t iy = 0; iy < ys.size(); ++iy)
        for (std::size_t ix = 0; ix < xs.size(); ++ix)
          if (!seen[(iz * ys.size() + iy) * xs.size() + ix]) {
            std::ostringstream msg;
            msg << "non-rectangular lattice: missing node (x=" << xs[ix];
            if (has_y) msg << ", y=" << ys[iy];
            msg << ", z=" << zs[iz] << ")";
            throw ParseError(source, line_no, msg.str());
          }
  }
  return std::make_shared<const GridField>(std::move(xs), std::move(ys), std::move(zs),
                                           std::move(values));
}

WindFieldPtr load_grid_field(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open wind grid file " + path.string());
  return parse_grid_field(in, path.string());
}

// ---------------------------------------------------------------------------
// Feasibility

ExcessUpdraft excess_updraft(const WindField& field, const AeroModel& aero, const Vec3& position) {
  const Vec3 wind = field.sample(position).velocity;
  const double updraft = -wind.z();
  const double horizontal = wind.head<2>().norm();
  ExcessUpdraft out;
  if (auto trim = aero.glide_trim(horizontal)) {
    out.value = updraft - trim->sink_rate;
    return out;
  }
  // Too slow to glide: use the sink rate at the stall speed.
  const auto& lift = aero.cl(aero.alpha_stall());
  const double ratio = aero.cd(aero.alpha_stall()).value / lift.value;
  const double stall_speed =
      std::sqrt(2.0 * aero.mass() * kGravity / (aero.air_density() * aero.wing_area() * lift.value));
  out.value = updraft - stall_speed * ratio;
  out.out_of_envelope = true;
  return out;
}

std::vector<FeasibilityPoint> feasibility_map(const WindField& field, const AeroModel& aero,
                                              const FeasibilityGrid& grid) {
  if (grid.nx < 1 || grid.nz < 1 || !(grid.x_max >= grid.x_min) || !(grid.z_max >= grid.z_min)) {
    throw ConfigError("feasibility grid: invalid extents or counts");
  }
  std::vector<FeasibilityPoint> out;
  out.reserve(static_cast<std::size_t>(grid.nx) * grid.nz);
  for (int iz = 0; iz < grid.nz; ++iz) {
    const double z = grid.nz == 1 ? grid.z_min
                                  : grid.z_min + (grid.z_max - grid.z_min) * iz / (grid.nz - 1);
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double x = grid.nx == 1 ? grid.x_min
                                    : grid.x_min + (grid.x_max - grid.x_min) * ix / (grid.nx - 1);
      const ExcessUpdraft e = excess_updraft(field, aero, Vec3(x, grid.y, z));
      out.push_back({x, z, e.value, e.out_of_envelope});
    }
  }
  return out;
}

void write_feasibility_csv(std::ostream& out, const std::vector<FeasibilityPoint>& points) {
  out << "x,z,excess_updraft\n";
  char buf[96];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f\n", p.x, p.z, p.excess_updraft);
    out << buf;
  }
}

}  // namespace orosoar
