#pragma once

// BMO and BMO^p seminorms, the John–Nirenberg stopping-time construction on
// a ball, and the exponential decay of the distribution of |f - f_S|.

#include <span>
#include <string>
#include <vector>

#include "lhs/space.hpp"

namespace lhs {

struct SeminormResult {
  double value = 0.0;
  /// Witness ball {y : rho(center, y) <= radius}.
  Id center = -1;
  double radius = 0.0;
  std::int64_t candidates = 0;
};

/// sup over centers in Ω_n and radii < cap of (avg |f - f_B|^p)^(1/p).
/// Throws GeometryError if a visited ball leaves Ω_{n+1}.
SeminormResult oscillation_sup(const Space& space, const LocalStructure& structure,
                               const SampledFunction& f, int n, double p, double cap);

/// [f]_n: p = 1, radii up to 2 eps_n.
SeminormResult bmo_seminorm(const Space& space, const LocalStructure& structure,
                            const SampledFunction& f, int n);

/// [f]_{p,n}: radii up to R_n. Throws ArgumentError for p <= 1.
SeminormResult bmo_p_seminorm(const Space& space, const LocalStructure& structure,
                              const SampledFunction& f, int n, double p);

struct JNRadius {
  double R = 0.0;
  double alpha = 0.0;
  double K = 0.0;
};
/// R_n = 2 eps_n / (B (9/2 B^2 + 3B + 1)), alpha_n = B (3K/2 + 1), B = B_{n+1}.
JNRadius jn_radius_cap(const LocalStructure& structure, int n);

struct BallRef {
  Id center = -1;
  double radius = 0.0;
};

struct JNNode {
  BallRef ball;
  int parent = -1;
  std::vector<int> children;
  double mass = 0.0;
  double mean = 0.0;
  std::size_t points = 0;
  double A_hat = 0.0;
  double c_hat = 1.0;
  double U_mass = 0.0;
  /// "", "empty_U", "few_points", "depth".
  std::string terminated;
  bool superlevel_covered = true;
  bool halving = true;
  bool mean_drift = true;
};

struct JNTree {
  BallRef base;
  double seminorm = 0.0;
  /// In the units of f (normalization undone).
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double c = 1.0;
  double A = 0.0;
  int iterations = 0;
  bool nested = true;
  /// levels[d] holds node indices created at step d (levels[0] = {root}).
  std::vector<std::vector<int>> levels;
  std::vector<JNNode> nodes;
  /// mu({|f - f_S| > N lambda1}) and 2^-N mu(S), N = 1..steps.
  std::vector<double> tail_mass;
  std::vector<double> tail_bound;
  VerificationReport report;
};

/// Requires S admissible (center in Ω_n, 0 < R <= R_n). lambda0_override > 0
/// fixes lambda0 (in units of f) instead of the measured 2 c A.
JNTree jn_construct(const Space& space, const LocalStructure& structure, const SampledFunction& f,
                    int n, BallRef S, int steps, double lambda0_override = 0.0);

struct JNDistribution {
  double seminorm = 0.0;
  double mass = 0.0;
  double b_hat = 0.0;          // on the default grid
  double b_hat_refined = 0.0;  // on the 2x refined grid
  double b_exact = 0.0;        // inf over all lambda > 0
  VerificationReport report;
};

/// Empty lambda_grid selects 64 geometric points from 0.05 [f]_n to
/// max |f - f_S|.
JNDistribution jn_verify(const Space& space, const LocalStructure& structure,
                         const SampledFunction& f, int n, BallRef S,
                         std::span<const double> lambda_grid = {});

/// Default admissible ball: point of Ω_n nearest `near` (or the level's
/// middle id) with radius R_n.
BallRef default_jn_ball(const Space& space, const LocalStructure& structure, int n,
                        std::span<const double> near = {});

VerificationReport bmo_equiv_check(const Space& space, const LocalStructure& structure,
                                   const SampledFunction& f, int n, double p);

/// (2 p Gamma(p) / b^p)^(1/p).
double gamma_form_constant(double p, double b);

}  // namespace lhs
