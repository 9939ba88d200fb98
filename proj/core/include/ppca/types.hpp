#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace ppca {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Per-endpoint activity pattern over the K ambient dimensions, one column
/// per bin endpoint.  Entries are exactly 0 or 1.
using MaskMatrix = Eigen::ArrayXXd;

/// Per-observation activity pattern (true = dimension participates).
using ActiveSet = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// Seed used by every command and generator unless the caller overrides it.
inline constexpr std::uint64_t kDefaultSeed = 12345;

}  // namespace ppca
