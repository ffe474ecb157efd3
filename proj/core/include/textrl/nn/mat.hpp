#pragma once

#include <Eigen/Core>

namespace textrl::nn {

using Mat = Eigen::MatrixXd;

}  // namespace textrl::nn
