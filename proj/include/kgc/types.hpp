#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace kgc {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;
using Index = std::int64_t;

// Row-major so that one embedding row is contiguous.
template <typename F>
using Mx = Eigen::Matrix<F, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename F>
using Vx = Eigen::Matrix<F, Eigen::Dynamic, 1>;

using Mxd = Mx<double>;
using Vxd = Vx<double>;

/// Malformed or inconsistent input data (dataset files, checkpoints, configs).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A non-finite loss or gradient surfaced during optimization.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kgc
