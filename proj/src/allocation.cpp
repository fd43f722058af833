#include "orosoar/allocation.hpp"

#include "orosoar/geometry.hpp"

namespace orosoar {

Eigen::VectorXd allocate(const Eigen::MatrixXd& effectiveness, const Eigen::VectorXd& demand,
                         const Eigen::VectorXd& axis_weights,
                         const Eigen::VectorXd& actuator_weights, double mass) {
  const auto rows = effectiveness.rows();
  const auto cols = effectiveness.cols();
  if (demand.size() != rows || axis_weights.size() != rows || actuator_weights.size() != cols) {
    throw ConfigError("allocate: dimension mismatch");
  }
  if ((axis_weights.array() <= 0.0).any() || (actuator_weights.array() <= 0.0).any()) {
    throw ConfigError("allocate: weights must be positive");
  }
  const Eigen::MatrixXd gtw = effectiveness.transpose() * axis_weights.asDiagonal();
  Eigen::MatrixXd normal = gtw * effectiveness;
  normal.diagonal() += actuator_weights;
  return normal.ldlt().solve(gtw * (mass * demand));
}

}  // namespace orosoar
