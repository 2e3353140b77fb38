#pragma once

// OpenMP-parallel ball sweeps. Every sweep enumerates, for each center, the
// distinct balls {y : rho(c, y) < r} as prefixes of the center's neighbors in
// canonical (distance, id) order, evaluates a per-ball statistic from running
// sums, and scatters it to the ball's members by a suffix max. Serial
// all-pairs counterparts live in reference.hpp.

#include <cstdint>
#include <span>
#include <vector>

#include "lhs/space.hpp"

namespace lhs::kernels {

/// Which balls a sweep visits around each center.
struct BallScan {
  /// Radii range over (0, cap]; with an empty grid every realized ball is
  /// visited (the lossless discretization of the continuum sup).
  double cap = 0.0;
  /// Optional explicit radii, each in (0, cap].
  std::span<const double> radius_grid = {};
  /// Optional containment constraint: only balls whose members all lie here.
  const Mask* within = nullptr;
};

struct PrefixBalls {
  std::vector<Neighbor> nb;
  /// Exclusive end index in `nb` of each visited ball, strictly increasing.
  std::vector<std::uint32_t> ends;
};

PrefixBalls prefix_balls(const Space& space, Id center, const BallScan& scan);

/// Per-ball averages of `values` (already |f| if desired), one per end.
std::vector<double> ball_averages(const Space& space, const PrefixBalls& pb,
                                  std::span<const double> values);

/// Per-ball mean oscillation (avg |f - f_B|^p)^(1/p), one per end. p = 1
/// uses a Fenwick tree over value ranks (O(K log K) per center); p > 1 is
/// evaluated directly.
std::vector<double> ball_oscillations(const Space& space, const PrefixBalls& pb,
                                      std::span<const double> values, double p);

struct PointwiseSup {
  /// Per point sup over visited balls containing it (0 where none / not
  /// evaluated).
  std::vector<double> value;
  std::int64_t candidates = 0;
};

/// sup over balls B ∋ x of avg(values, B), for x in eval_mask.
PointwiseSup max_average(const Space& space, std::span<const Id> centers, const BallScan& scan,
                         std::span<const double> values, const Mask& eval_mask);

/// sup over balls B ∋ x of (avg |f - f_B|^p)^(1/p), for x in eval_mask.
PointwiseSup max_oscillation(const Space& space, std::span<const Id> centers,
                             const BallScan& scan, std::span<const double> values,
                             const Mask& eval_mask, double p);

struct GlobalSup {
  double value = 0.0;
  Id center = -1;
  /// Largest member distance of the witness ball (ball = {d <= radius}).
  double radius = 0.0;
  std::int64_t candidates = 0;
  /// True when every visited ball lies inside `inside` (if given).
  bool contained = true;
};

/// sup over all visited balls of (avg |f - f_B|^p)^(1/p). Ties resolve to
/// the smallest center id, then the smallest ball.
GlobalSup sup_oscillation(const Space& space, std::span<const Id> centers, const BallScan& scan,
                          std::span<const double> values, double p,
                          const Mask* inside = nullptr);

}  // namespace lhs::kernels
