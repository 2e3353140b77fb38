#pragma once

// Dyadic cubes subordinated to Ω_n: nested δ^k-nets over Ω_n, parent links
// to the nearest coarser center, and points assigned through the finest net.

#include <cstdint>
#include <vector>

#include "lhs/space.hpp"

namespace lhs {

struct Cube {
  Id id = -1;
  int gen = 0;
  Id center = -1;
  Id parent = -1;
  std::vector<Id> children;
  IdSet members;
  double mass = 0.0;
};

class DyadicForest {
 public:
  int n = 0;
  double delta = 0.25;
  int depth = 0;
  std::vector<Cube> cubes;
  /// generations[k - 1] lists the cube ids of generation k.
  std::vector<std::vector<Id>> generations;
  /// cube_of[k - 1][x] is the generation-k cube containing x, or -1.
  std::vector<std::vector<Id>> cube_of;
  IdSet points;
  /// Always empty: assignment is total on the sample.
  IdSet exceptional;

  double scale(int k) const;
  const Cube& cube(Id id) const;
  Id cube_containing(Id x, int k) const;
};

/// Throws ArgumentError for delta outside (0, 1) or depth < 1, and
/// ScaleError if a generation ends up empty.
DyadicForest build_forest(const Space& space, const LocalStructure& structure, int n,
                          double delta, int depth);

/// Smallest depth at which every finest cube is a single point of Ω_n.
int atomic_depth(const Space& space, const LocalStructure& structure, int n, double delta);

Id ancestor(const DyadicForest& forest, Id cube, int k);
std::vector<Id> subcubes(const DyadicForest& forest, Id cube, int k);

/// Cheap per-forest constants.
struct ForestConstants {
  /// min over cubes of rho(z, Ω_n \ Q) / δ^k (inf when Q = Ω_n).
  double a0 = 0.0;
  /// max over cubes of max(diam Q, max rho(z, Q)) / δ^k, nudged up so that
  /// Q ⊂ B(z, c1 δ^k) strictly.
  double c1 = 0.0;
  /// max over parent/child pairs of μ(parent) / μ(child).
  double parent_child = 1.0;
};
ForestConstants forest_constants(const Space& space, const DyadicForest& forest);

struct CubeTriple {
  Id cube;
  Id x;
  double r;
};

/// Ratios measured at one (cube, x, r): μ(B(x,2r)∩Q)/μ(B(x,r)∩Q) and the
/// lower-bound ratio μ(B(x,r)∩Q)/μ(B(x,r)) for r <= δ^k, else /μ(Q).
struct TripleRatios {
  double doubling;
  double lower;
  bool small_scale;
};
TripleRatios cube_triple_ratios(const Space& space, const DyadicForest& forest,
                                const CubeTriple& t);

/// Candidate radii for (cube, x): right endpoints where one of the ratios
/// above can change.
std::vector<double> cube_triple_radii(const Space& space, const DyadicForest& forest, Id cube,
                                      Id x);

/// Properties (a)-(h). Triples are enumerated exhaustively when their
/// count fits the budget, otherwise sampled; the sampled triples are listed
/// in the "triples" table.
VerificationReport verify_forest(const Space& space, const LocalStructure& structure,
                                 const DyadicForest& forest, std::int64_t sample_budget,
                                 std::uint64_t seed = 7);

}  // namespace lhs
