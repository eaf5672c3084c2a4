#pragma once

#include <Eigen/Dense>

namespace lqcons {

template <class Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = DenseMatrix<double>;
using Vector = DenseVector<double>;
using Index = Eigen::Index;

// Validation tolerance on row sums and diagonal positivity.
inline constexpr double kDefaultTol = 1e-9;
// Max-norm tolerance for the reversible/normal/commuting tests.
inline constexpr double kClassifyTol = 1e-9;
// Entries at or below this count as structural zeros for matrices parsed from text.
inline constexpr double kFileSupportThreshold = 1e-14;

}  // namespace lqcons
