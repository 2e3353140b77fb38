#pragma once

// Local maximal operator M_{Ω_n,Ω_{n+1}}: sup of averages of |f| over balls
// centered in Ω_n with radius at most r_n that contain the point.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "lhs/space.hpp"

namespace lhs {

struct MaximalResult {
  /// Mf on Ω_n; support is Ω_n.
  SampledFunction values;
  double cap_r = 0.0;
  std::int64_t candidate_count = 0;
  int level = 0;
};

/// Empty radius_grid means every realized ball (the exact discrete sup).
/// Throws PreconditionError if a grid radius exceeds r_n.
MaximalResult local_maximal(const Space& space, const LocalStructure& structure,
                            const SampledFunction& f, int n,
                            std::span<const double> radius_grid = {});

/// Same ball family as local_maximal, computed by the all-pairs oracle.
MaximalResult local_maximal_reference(const Space& space, const LocalStructure& structure,
                                      const SampledFunction& f, int n,
                                      std::span<const double> radius_grid = {});

/// Lp norm of f over ids (p = inf gives the sup norm).
double lp_norm(const Space& space, const SampledFunction& f, const IdSet& ids, double p);

VerificationReport weak_type_check(const Space& space, const LocalStructure& structure,
                                   const SampledFunction& f, int n,
                                   std::span<const double> t_grid,
                                   double bound = std::numeric_limits<double>::infinity());

/// Throws ArgumentError for p <= 1.
VerificationReport strong_type_check(const Space& space, const LocalStructure& structure,
                                     const SampledFunction& f, int n, double p);

VerificationReport differentiation_check(const Space& space, const LocalStructure& structure,
                                         const SampledFunction& f, int n);

}  // namespace lhs
