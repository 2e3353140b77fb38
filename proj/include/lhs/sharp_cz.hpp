#pragma once

// Sharp maximal functions, the Calderón–Zygmund stopping time on a dyadic
// forest, and checks of the local Fefferman–Stein inequality.

#include <string>
#include <vector>

#include "lhs/covering.hpp"
#include "lhs/dyadic.hpp"
#include "lhs/space.hpp"

namespace lhs {

/// Largest-measure cube of generation k0 (ties: smaller id).
Id default_root(const DyadicForest& forest, int k0 = 1);

/// Cube of generation k0 containing the forest point nearest the center of
/// the bounding box of the forest points (ties: smaller id).
Id central_root(const Space& space, const DyadicForest& forest, int k0);

/// Smallest generation k0 such that every cube of generation >= k0 lies in
/// the open ball of radius r_{n+1} around its center, so that averages over
/// cubes below a root of that generation are dominated by the local maximal
/// function at level n + 1. Throws ScaleError when no generation qualifies.
int small_root_generation(const Space& space, const LocalStructure& structure,
                          const DyadicForest& forest);

/// Subcubes of root at every generation, root included, ascending ids.
std::vector<Id> cubes_below(const DyadicForest& forest, Id root);

/// avg(values, Q) summed over members in id order.
double cube_average(const Space& space, const DyadicForest& forest, Id cube,
                    std::span<const double> values);

/// sup over cubes x ∈ Q ⊆ root of avg |f - f_Q| over Q. Points outside the
/// root read 0 and are counted in `outside`.
struct DyadicSharp {
  SampledFunction values;
  std::size_t outside = 0;
};
DyadicSharp dyadic_sharp(const Space& space, const DyadicForest& forest,
                         const SampledFunction& f, Id root);

/// sup over balls B(c, r) ∋ x with c in Ω_n and r <= eps_n of
/// (avg |f - f_B|^p)^(1/p), at every point of the space.
SampledFunction ball_sharp(const Space& space, const LocalStructure& structure,
                           const SampledFunction& f, int n, double p = 1.0);

VerificationReport sharp_comparison_check(const Space& space, const LocalStructure& structure,
                                          const DyadicForest& forest, const SampledFunction& f,
                                          Id root);

struct CZFamily {
  double lambda = 0.0;
  std::vector<Id> cubes;
  Id root = -1;
  double a = 0.0;
};

/// Maximal subcubes of root with avg |f| > lambda. Throws PreconditionError
/// when lambda < avg(|f|, root).
CZFamily cz_decompose(const Space& space, const DyadicForest& forest, const SampledFunction& f,
                      Id root, double lambda);

/// Measured constants of the decomposition over a set of thresholds.
struct CZConstants {
  double c_n = 1.0;       // parent/child measure ratio of the forest
  double c_upper = 1.0;   // max avg|f|_Q / lambda over selected cubes
  double c_prime = 1.0;   // (iv)
  double c_dprime = 1.0;  // (v), threshold factor
  double c_tprime = 1.0;  // (v), measure factor
};

/// Mf = M_{Ω_{n+1},Ω_{n+2}}(f χ_root) on the root members.
SampledFunction root_maximal(const Space& space, const LocalStructure& structure,
                             const DyadicForest& forest, const SampledFunction& f, Id root);

CZConstants cz_constants(const Space& space, const DyadicForest& forest,
                         const SampledFunction& f, const SampledFunction& Mf, Id root,
                         std::span<const double> lambdas);

/// Properties (i)-(v) and the engulfing claim. Throws ArgumentError for
/// unsorted lambdas, PreconditionError for lambda below the root average.
VerificationReport cz_family_properties(const Space& space, const LocalStructure& structure,
                                        const DyadicForest& forest, const SampledFunction& f,
                                        Id root, std::span<const double> lambdas);

struct FSReport {
  double p = 1.0;
  std::string sharp_kind;
  double lhs = 0.0;
  double rhs_sharp_term = 0.0;
  double rhs_avg_term = 0.0;
  double ratio = 1.0;
  /// (avg |f|^p)^(1/p) in place of the Mf term.
  double ratio_f_norm = 1.0;
  CZConstants constants;
  /// Smallest A in {2^0, ..., 2^20} valid at every grid lambda (inf if none).
  double A_uniform = 0.0;
  double A_closed_form = 0.0;
  bool good_lambda_pointwise = true;
  VerificationReport report;
};

/// sharp_kind is "dyadic" or "ball". Throws ArgumentError for p < 1.
FSReport fs_verify(const Space& space, const LocalStructure& structure,
                   const DyadicForest& forest, const SampledFunction& f, Id root, double p,
                   const std::string& sharp_kind);

/// Concentric balls around the root center. Throws GeometryError when
/// B1 ⊆ root ⊆ B2 fails.
VerificationReport corollary_ball_check(const Space& space, const LocalStructure& structure,
                                        const DyadicForest& forest, const SampledFunction& f,
                                        Id root, double p);

/// Mean-zero test functions on each core ball of a finite cover: "zero",
/// "left_half", "centered_linear". The forest must be subordinated to
/// level n + 1.
VerificationReport cover_lp_check(const Space& space, const LocalStructure& structure,
                                  const DyadicForest& forest,
                                  const std::vector<std::string>& f_family, int n, int k,
                                  double p);

/// Test function of cover_lp_check on one piece; throws PreconditionError
/// when the weighted mean over the core ball is not zero.
SampledFunction cover_test_function(const Space& space, const CoverPiece& piece,
                                    const std::string& name);

}  // namespace lhs
