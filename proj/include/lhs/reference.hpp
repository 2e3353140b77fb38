#pragma once

// Serial all-pairs oracles. Each ball is materialized explicitly by scanning
// every point, so these share no indexing with the kernels; only the
// accumulation order (distance, then id) is common.

#include <span>
#include <vector>

#include "lhs/space.hpp"

namespace lhs::reference {

/// Points y with rho(center, y) <= d, sorted by (distance, id).
std::vector<Neighbor> closed_ball(const Space& space, Id center, double d);

/// sup over balls B(c, r) with c in centers, r in (0, cap] (or the grid),
/// B ∋ x, of avg(values, B); evaluated for x in eval_mask.
std::vector<double> max_average(const Space& space, std::span<const Id> centers, double cap,
                                std::span<const double> radius_grid,
                                std::span<const double> values, const Mask& eval_mask);

/// Same ball family, (avg |f - f_B|^p)^(1/p) instead of the average.
std::vector<double> max_oscillation(const Space& space, std::span<const Id> centers, double cap,
                                    std::span<const double> values, const Mask& eval_mask,
                                    double p);

}  // namespace lhs::reference
