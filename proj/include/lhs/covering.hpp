#pragma once

// Vitali-type selection of disjoint balls and finite ball covers of Ω_n
// built from dyadic cubes.

#include <vector>

#include "lhs/dyadic.hpp"
#include "lhs/space.hpp"

namespace lhs {

struct BallSpec {
  Id center = -1;
  double radius = 0.0;
};

struct BallFamily {
  std::vector<BallSpec> balls;
  int level = 1;
};

/// r_n = 2 eps_n / K_n with K_n = 2 B_{n+1} + 3 B_{n+1}^2.
struct VitaliCap {
  double r = 0.0;
  double K = 0.0;
};
VitaliCap vitali_radius_cap(const LocalStructure& structure, int n);

/// Indices of the greedily kept balls: nonincreasing radius, ties by smaller
/// center id, a ball is kept iff its points avoid every kept ball.
std::vector<std::size_t> greedy_disjoint_select(const Space& space,
                                                const std::vector<BallSpec>& balls);

struct VitaliResult {
  BallFamily selected;
  VerificationReport report;
};

VitaliResult vitali_select(const Space& space, const LocalStructure& structure,
                           const BallFamily& family, const IdSet& E);

struct CoverPiece {
  Id cube = -1;
  Id center = -1;
  /// Core ball B(z, c1 δ^k).
  double core_radius = 0.0;
  IdSet core_ball;
  /// Union of the generation-k cubes meeting the core ball.
  IdSet region;
  std::vector<Id> region_cubes;
  /// Enclosing ball B(z, c' δ^k) ⊇ region.
  double enclosing_radius = 0.0;
};

struct FiniteCover {
  int n = 0;
  int k = 0;
  double c1 = 0.0;
  double c_prime = 0.0;
  double gamma = 0.0;
  std::vector<CoverPiece> pieces;
  VerificationReport report;
};

/// Cover of Ω_n by the generation-k cubes of a forest subordinated to
/// Ω_{n+1}. Throws ScaleError (naming the smallest admissible k) when some
/// core ball leaves Ω_{n+1}.
FiniteCover finite_ball_cover(const Space& space, const LocalStructure& structure,
                              const DyadicForest& forest, int n, int k);

}  // namespace lhs
