#pragma once

#include <Eigen/Dense>

#include <limits>

namespace posctl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Spectral abscissa strictly below this counts as Hurwitz. Consensus
// Laplacians sit exactly at zero, so the boundary is declared unstable.
inline constexpr double kHurwitzMargin = -1e-12;

}  // namespace posctl
