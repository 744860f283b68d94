#pragma once

#include <cstdint>
#include <limits>
#include <Eigen/Dense>

namespace aw {

using Scalar = double;
using Index = Eigen::Index;

using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<Index, Eigen::Dynamic, 1>;

using VectorRef = Eigen::Ref<Vector>;
using ConstVectorRef = Eigen::Ref<const Vector>;
using MatrixRef = Eigen::Ref<Matrix>;
using ConstMatrixRef = Eigen::Ref<const Matrix>;

constexpr Scalar kInfinity = std::numeric_limits<Scalar>::infinity();

// Numerical tolerances used across the library.  Local quantities
// (child probability sums, increment reconstruction) get the tighter
// bound; global quantities accumulated over a whole tree the looser one.
constexpr Scalar kProbTolLocal = 1e-12;
constexpr Scalar kProbTolGlobal = 1e-10;
constexpr Scalar kLpFeasTol = 1e-9;
constexpr Scalar kMartingaleTol = 1e-10;

}  // namespace aw
