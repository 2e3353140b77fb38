#pragma once

// Discrete model of a locally homogeneous space: a finite weighted point
// cloud carrying a quasidistance and a nested exhaustion Ω_1 ⊆ Ω_2 ⊆ ...
// with per-level constants (eps_n, B_n, C_n).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lhs/report.hpp"

namespace lhs {

using Id = std::int32_t;
/// Sorted, duplicate-free list of point ids.
using IdSet = std::vector<Id>;
/// Dense membership flags indexed by point id.
using Mask = std::vector<std::uint8_t>;

class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(int dim, std::vector<double> coords, std::vector<double> weights);

  std::size_t size() const { return weights_.size(); }
  int dim() const { return dim_; }
  std::span<const double> coords(Id i) const {
    return {coords_.data() + static_cast<std::size_t>(i) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  double weight(Id i) const { return weights_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& weights() const { return weights_; }
  double total_weight() const { return total_; }

 private:
  int dim_ = 0;
  std::vector<double> coords_;
  std::vector<double> weights_;
  double total_ = 0.0;
};

/// rho(x, y) = |x - y|^s with |.| the Euclidean norm. s = 1 is a metric;
/// s > 1 is a quasidistance with triangle constant 2^(s-1).
struct Quasidistance {
  double exponent = 1.0;

  double operator()(std::span<const double> a, std::span<const double> b) const;
  double triangle_constant() const;
  std::string kind() const { return exponent == 1.0 ? "euclidean" : "power"; }
};

class Space {
 public:
  Space() = default;
  Space(PointCloud cloud, Quasidistance rho);

  std::size_t size() const { return cloud_.size(); }
  const PointCloud& cloud() const { return cloud_; }
  const Quasidistance& rho() const { return rho_; }

  double dist(Id a, Id b) const {
    if (!cache_.empty()) return cache_[static_cast<std::size_t>(a) * size() + b];
    return rho_(cloud_.coords(a), cloud_.coords(b));
  }
  double weight(Id i) const { return cloud_.weight(i); }

  /// Dense N x N distance table; refuses N > 8192.
  void enable_cache();
  bool cached() const { return !cache_.empty(); }

  bool valid(Id i) const { return i >= 0 && static_cast<std::size_t>(i) < size(); }
  void require_id(Id i) const;

 private:
  PointCloud cloud_;
  Quasidistance rho_;
  std::vector<double> cache_;
};

struct Level {
  IdSet ids;
  Mask mask;
  double eps = 0.0;
  double B = 1.0;
  double C = 2.0;

  bool contains(Id i) const { return mask[static_cast<std::size_t>(i)] != 0; }
};

/// Exhaustion levels, addressed 1-based as in Ω_1, Ω_2, ...
class LocalStructure {
 public:
  LocalStructure() = default;
  explicit LocalStructure(std::vector<Level> levels) : levels_(std::move(levels)) {}

  int depth() const { return static_cast<int>(levels_.size()); }
  bool has(int n) const { return n >= 1 && n <= depth(); }
  /// Throws ConfigurationError when level n does not exist.
  const Level& level(int n) const;
  std::vector<Level>& levels() { return levels_; }
  const std::vector<Level>& levels() const { return levels_; }

 private:
  std::vector<Level> levels_;
};

Level make_level(std::size_t n_points, IdSet ids, double eps, double B, double C);

/// Values at every point; ids outside `support` (when set) read as zero.
struct SampledFunction {
  std::vector<double> values;
  std::optional<Mask> support;

  double operator()(Id i) const {
    const auto k = static_cast<std::size_t>(i);
    if (support && !(*support)[k]) return 0.0;
    return values[k];
  }
  std::size_t size() const { return values.size(); }

  static SampledFunction constant(std::size_t n, double c);
  /// Same values with the support restricted to `ids` (extension by zero).
  SampledFunction restricted_to(const IdSet& ids) const;
  /// Plain vector of the effective values (zeros outside the support).
  std::vector<double> effective() const;
};

struct Neighbor {
  double d;
  Id id;
};

/// Points with rho(center, y) < cap, sorted by (distance, id). This order is
/// the canonical accumulation order for every ball sum in the library.
std::vector<Neighbor> sorted_neighbors(const Space& space, Id center, double cap);

/// {y : rho(center, y) < r}.
IdSet ball(const Space& space, Id center, double r);

double measure(const Space& space, const IdSet& ids);

/// Weighted mean of f over ids; masked-out ids count as value 0 with full
/// weight. Throws DomainError on a null set.
double average(const Space& space, const SampledFunction& f, const IdSet& ids);

/// Cumulative weight of the points around a center, by distance.
/// mass_below(r) = mu(B(center, r)) for r <= cap.
class RadialProfile {
 public:
  RadialProfile(const Space& space, Id center, double cap);

  double mass_below(double r) const;
  std::span<const double> distances() const { return dist_; }

 private:
  std::vector<double> dist_;
  std::vector<double> cum_;  // cum_[k] = weight of the first k neighbors
};

/// Exact sup over 0 < r <= r_max of mu(B(x, factor r)) / mu(B(x, r)).
/// Both balls are step functions of r, so the sup is attained at one of the
/// right endpoints {d, d / factor, r_max}.
struct BallRatio {
  double ratio = 1.0;
  double radius = 0.0;
};
BallRatio max_ball_ratio(const Space& space, Id x, double factor, double r_max);

/// Candidate radii (interval right endpoints) for the ratio above.
std::vector<double> ball_ratio_breakpoints(const Space& space, Id x, double factor,
                                           double r_max);

/// Throws ConfigurationError for an empty structure, an empty level, a mask
/// of the wrong size, or constants outside eps > 0, B >= 1, C > 1. Nesting,
/// exhaustion and monotonicity are reported by verify_axioms instead.
void validate_structure(const Space& space, const LocalStructure& structure);

VerificationReport verify_axioms(const Space& space, const LocalStructure& structure,
                                 std::int64_t sample_budget, std::uint64_t seed = 7);

struct BuiltinParams {
  std::size_t N = 256;
  double exponent = 1.0;
  std::string weight_profile = "uniform";
  int levels = 4;
};

struct Instance {
  Space space;
  LocalStructure structure;
  std::string name;
};

/// grid1d, grid2d, power_rho_grid, weighted_grid, tiny4.
Instance instantiate_builtin(const std::string& name, const BuiltinParams& params = {});

IdSet mask_to_ids(const Mask& mask);
Mask ids_to_mask(std::size_t n, const IdSet& ids);

}  // namespace lhs
