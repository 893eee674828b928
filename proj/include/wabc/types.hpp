#pragma once

#include <Eigen/Dense>

namespace wabc {

// Rows are observations / points throughout; row-major so a row is contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace wabc
