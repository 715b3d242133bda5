#pragma once

#include <Eigen/Dense>

namespace rhc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace rhc
