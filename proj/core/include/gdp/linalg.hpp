#pragma once

#include <Eigen/Dense>

namespace gdp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Point sets are stored one point per row.
using PointSet = Eigen::MatrixXd;

}  // namespace gdp
