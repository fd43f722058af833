// Frames, rotations and the small set of shared value types.
//
// Conventions used everywhere in the library:
//   * positions, velocities and accelerations are NED (x north, y east,
//     z down); altitude is -z.
//   * attitude is (roll, pitch, yaw) with the body-to-NED rotation
//     R = Rz(yaw) * Rx(roll) * Ry(pitch). This is the rotation whose first
//     column is the thrust direction used by the effectiveness model.
//   * wind is the velocity of the air mass; an updraft has w < 0.
#pragma once

#include <Eigen/Dense>

#include <numbers>
#include <stdexcept>
#include <string>

namespace orosoar {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kGravity = 9.80665;

constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

struct Attitude {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

/// Body-to-NED rotation Rz(yaw) Rx(roll) Ry(pitch).
Mat3 body_to_ned(const Attitude& att);

/// Raised for invalid parameters or configuration files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for malformed input files; the message names the offending line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace orosoar
