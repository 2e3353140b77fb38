#pragma once

// Loading spaces and functions from builtin specs or files.

#include <string>

#include "lhs/functions.hpp"
#include "lhs/space.hpp"

namespace lhs {

/// JSON space definition:
///   {"points": [[x, ...], ...], "weights": [...],
///    "rho": {"kind": "euclidean" | "power", "params": {"exponent": s}},
///    "levels": [{"ids": [...]} or {"box": [[lo, hi], ...]}, "eps", "B", "C"]}
/// Box levels take the points strictly inside the box.
Instance parse_space_json(const Json& j, const std::string& name = "file");
Instance load_space_file(const std::string& path);

/// "grid1d", "grid1d:N=1024", "power_rho_grid:N=256,exponent=2,levels=5",
/// or a path to a JSON space file.
Instance resolve_space(const std::string& spec);

/// CSV with header `point_id,value`; ids not listed read as zero.
SampledFunction load_function_csv(const std::string& path, std::size_t n_points);

/// "log_singularity", "two_valued:threshold=0.3,axis=0",
/// "log_singularity:anchor=0.5;0.5", "random_piecewise:seed=9,pieces=4",
/// or a path to a CSV file.
SampledFunction resolve_function(const std::string& spec, const Space& space);

}  // namespace lhs
