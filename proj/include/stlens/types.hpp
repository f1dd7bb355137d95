#pragma once

#include <Eigen/Dense>

namespace stlens {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

} // namespace stlens
