#pragma once

// Test functions sampled on a point cloud.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lhs/space.hpp"

namespace lhs {

struct FunctionParams {
  double c = 1.0;
  /// Defaults to the bounding-box center of the cloud.
  std::optional<std::vector<double>> anchor;
  std::uint64_t seed = 7;
  int axis = 0;
  double threshold = 0.5;
  int pieces = 8;
};

/// constant, indicator_halfspace, log_singularity, two_valued, atom_spike,
/// random_piecewise. Throws ArgumentError for anything else.
SampledFunction function_library(const std::string& name, const FunctionParams& params,
                                 const Space& space);

/// Names accepted by function_library, in a fixed order.
const std::vector<std::string>& function_names();

}  // namespace lhs
