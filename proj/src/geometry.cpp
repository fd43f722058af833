#include "orosoar/geometry.hpp"

#include <cmath>

namespace orosoar {

double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

Mat3 body_to_ned(const Attitude& att) {
  const double cphi = std::cos(att.roll), sphi = std::sin(att.roll);
  const double cth = std::cos(att.pitch), sth = std::sin(att.pitch);
  const double cpsi = std::cos(att.yaw), spsi = std::sin(att.yaw);
  Mat3 r;
  r << cth * cpsi - sphi * sth * spsi, -cphi * spsi, sth * cpsi + sphi * cth * spsi,
      cth * spsi + sphi * sth * cpsi, cphi * cpsi, sth * spsi - sphi * cth * cpsi,
      -cphi * sth, sphi, cphi * cth;
  return r;
}

ParseError::ParseError(const std::string& source, int line, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

}  // namespace orosoar
