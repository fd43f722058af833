// Independent reference computations shared by the unit and acceptance tests.
#pragma once

#include "orosoar/aero.hpp"
#include "orosoar/dynamics.hpp"

#include <Eigen/Dense>

namespace oracle {

using orosoar::Attitude;
using orosoar::Mat3;
using orosoar::Vec3;

/// Central-difference Jacobian of m * simplified_acceleration with respect to
/// (roll, pitch, thrust), with alpha moving one-for-one with pitch.
inline Mat3 force_jacobian(const Attitude& att, double thrust, double alpha, double airspeed,
                           const orosoar::AeroModel& aero, double h = 1e-6) {
  auto force = [&](double roll, double pitch, double t) {
    const Attitude a{roll, pitch, att.yaw};
    return Vec3(aero.mass() * orosoar::simplified_acceleration(a, t, alpha + (pitch - att.pitch),
                                                               airspeed, aero));
  };
  Mat3 j;
  j.col(0) = (force(att.roll + h, att.pitch, thrust) - force(att.roll - h, att.pitch, thrust)) / (2 * h);
  j.col(1) = (force(att.roll, att.pitch + h, thrust) - force(att.roll, att.pitch - h, thrust)) / (2 * h);
  j.col(2) = (force(att.roll, att.pitch, thrust + h) - force(att.roll, att.pitch, thrust - h)) / (2 * h);
  return j;
}

/// Regularised weighted least squares solved as a stacked least-squares
/// problem with column-pivoted QR, never forming the normal equations.
inline Eigen::VectorXd stacked_lsq(const Eigen::MatrixXd& g, const Eigen::VectorXd& demand,
                                   const Eigen::VectorXd& wa, const Eigen::VectorXd& wu,
                                   double mass) {
  const auto r = g.rows(), c = g.cols();
  Eigen::MatrixXd a(r + c, c);
  Eigen::VectorXd b(r + c);
  a.topRows(r) = wa.cwiseSqrt().asDiagonal() * g;
  a.bottomRows(c) = wu.cwiseSqrt().asDiagonal().toDenseMatrix();
  b.head(r) = wa.cwiseSqrt().cwiseProduct(mass * demand);
  b.tail(c).setZero();
  return a.colPivHouseholderQr().solve(b);
}

inline double wls_objective(const Eigen::MatrixXd& g, const Eigen::VectorXd& du,
                            const Eigen::VectorXd& demand, const Eigen::VectorXd& wa,
                            const Eigen::VectorXd& wu, double mass) {
  const Eigen::VectorXd r = g * du - mass * demand;
  return r.dot(wa.cwiseProduct(r)) + du.dot(wu.cwiseProduct(du));
}

}  // namespace oracle
