#pragma once

#include <Eigen/Dense>

namespace orosoar {

/// Weighted least-squares control allocation.
///
/// Returns the actuator increment du minimising
///   || Wa^1/2 (G du - m dnu) ||^2 + || Wu^1/2 du ||^2
/// from the regularised normal equations (G' Wa G + Wu) du = G' Wa m dnu.
/// Wa (one weight per output axis) and Wu (one per actuator) are diagonal and
/// strictly positive, so the system is well posed even when G is singular.
Eigen::VectorXd allocate(const Eigen::MatrixXd& effectiveness, const Eigen::VectorXd& demand,
                         const Eigen::VectorXd& axis_weights,
                         const Eigen::VectorXd& actuator_weights, double mass);

}  // namespace orosoar
