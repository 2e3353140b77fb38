#include "lhs/space.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "lhs/error.hpp"

namespace lhs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  return a.d < b.d || (a.d == b.d && a.id < b.id);
}

}  // namespace

PointCloud::PointCloud(int dim, std::vector<double> coords, std::vector<double> weights)
    : dim_(dim), coords_(std::move(coords)), weights_(std::move(weights)) {
  if (dim_ <= 0) throw ArgumentError("point dimension must be positive");
  if (coords_.size() != weights_.size() * static_cast<std::size_t>(dim_)) {
    throw ArgumentError("coordinate array does not match point count");
  }
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ArgumentError("weights must be positive and finite");
    total_ += w;
  }
}

double Quasidistance::operator()(std::span<const double> a, std::span<const double> b) const {
  double d;
  if (a.size() == 1) {
    d = std::fabs(a[0] - b[0]);
  } else {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double t = a[i] - b[i];
      s += t * t;
    }
    d = std::sqrt(s);
  }
  if (exponent == 1.0) return d;
  if (exponent == 2.0) return d * d;
  return std::pow(d, exponent);
}

double Quasidistance::triangle_constant() const {
  return exponent <= 1.0 ? 1.0 : std::pow(2.0, exponent - 1.0);
}

Space::Space(PointCloud cloud, Quasidistance rho) : cloud_(std::move(cloud)), rho_(rho) {
  if (!(rho_.exponent > 0.0)) throw ArgumentError("quasidistance exponent must be positive");
}

void Space::enable_cache() {
  const std::size_t n = size();
  if (n > 8192) throw ArgumentError("distance cache limited to N <= 8192");
  if (!cache_.empty()) return;
  std::vector<double> table(n * n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      table[static_cast<std::size_t>(i) * n + j] =
          rho_(cloud_.coords(static_cast<Id>(i)), cloud_.coords(static_cast<Id>(j)));
    }
  }
  cache_ = std::move(table);
}

void Space::require_id(Id i) const {
  if (!valid(i)) throw ArgumentError("unknown point id " + std::to_string(i));
}

const Level& LocalStructure::level(int n) const {
  if (!has(n)) {
    throw ConfigurationError("level " + std::to_string(n) + " does not exist (depth " +
                             std::to_string(depth()) + ")");
  }
  return levels_[static_cast<std::size_t>(n - 1)];
}

Level make_level(std::size_t n_points, IdSet ids, double eps, double B, double C) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  Level level;
  level.mask = ids_to_mask(n_points, ids);
  level.ids = std::move(ids);
  level.eps = eps;
  level.B = B;
  level.C = C;
  return level;
}

SampledFunction SampledFunction::constant(std::size_t n, double c) {
  return SampledFunction{std::vector<double>(n, c), std::nullopt};
}

SampledFunction SampledFunction::restricted_to(const IdSet& ids) const {
  SampledFunction g{values, ids_to_mask(values.size(), ids)};
  if (support) {
    for (std::size_t i = 0; i < values.size(); ++i) (*g.support)[i] &= (*support)[i];
  }
  return g;
}

std::vector<double> SampledFunction::effective() const {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (*this)(static_cast<Id>(i));
  return out;
}

IdSet mask_to_ids(const Mask& mask) {
  IdSet ids;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) ids.push_back(static_cast<Id>(i));
  }
  return ids;
}

Mask ids_to_mask(std::size_t n, const IdSet& ids) {
  Mask mask(n, 0);
  for (Id i : ids) {
    if (i < 0 || static_cast<std::size_t>(i) >= n) {
      throw ArgumentError("id " + std::to_string(i) + " outside the point cloud");
    }
    mask[static_cast<std::size_t>(i)] = 1;
  }
  return mask;
}

std::vector<Neighbor> sorted_neighbors(const Space& space, Id center, double cap) {
  std::vector<Neighbor> out;
  const auto n = static_cast<Id>(space.size());
  for (Id y = 0; y < n; ++y) {
    const double d = space.dist(center, y);
    if (d < cap) out.push_back({d, y});
  }
  std::sort(out.begin(), out.end(), neighbor_less);
  return out;
}

IdSet ball(const Space& space, Id center, double r) {
  space.require_id(center);
  if (!(r > 0.0)) throw ArgumentError("ball radius must be positive");
  IdSet out;
  const auto n = static_cast<Id>(space.size());
  for (Id y = 0; y < n; ++y) {
    if (space.dist(center, y) < r) out.push_back(y);
  }
  return out;
}

double measure(const Space& space, const IdSet& ids) {
  double m = 0.0;
  for (Id i : ids) m += space.weight(i);
  return m;
}

double average(const Space& space, const SampledFunction& f, const IdSet& ids) {
  double sw = 0.0;
  double swf = 0.0;
  for (Id i : ids) {
    const double w = space.weight(i);
    sw += w;
    swf += w * f(i);
  }
  if (!(sw > 0.0)) throw DomainError("average over a set of zero measure");
  return swf / sw;
}

RadialProfile::RadialProfile(const Space& space, Id center, double cap) {
  const auto nb = sorted_neighbors(space, center, cap);
  dist_.reserve(nb.size());
  cum_.reserve(nb.size() + 1);
  cum_.push_back(0.0);
  for (const auto& e : nb) {
    dist_.push_back(e.d);
    cum_.push_back(cum_.back() + space.weight(e.id));
  }
}

double RadialProfile::mass_below(double r) const {
  const auto k = std::lower_bound(dist_.begin(), dist_.end(), r) - dist_.begin();
  return cum_[static_cast<std::size_t>(k)];
}

std::vector<double> ball_ratio_breakpoints(const Space& space, Id x, double factor,
                                           double r_max) {
  std::vector<double> bp;
  const auto n = static_cast<Id>(space.size());
  for (Id y = 0; y < n; ++y) {
    const double d = space.dist(x, y);
    if (d > 0.0 && d <= r_max) bp.push_back(d);
    const double h = d / factor;
    if (h > 0.0 && h <= r_max) bp.push_back(h);
  }
  bp.push_back(r_max);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  return bp;
}

BallRatio max_ball_ratio(const Space& space, Id x, double factor, double r_max) {
  const RadialProfile prof(space, x, factor * r_max * (1.0 + 4 * DBL_EPSILON) + DBL_MIN);
  BallRatio best{0.0, 0.0};
  for (double r : ball_ratio_breakpoints(space, x, factor, r_max)) {
    const double ratio = prof.mass_below(factor * r) / prof.mass_below(r);
    if (ratio > best.ratio) best = {ratio, r};
  }
  return best;
}

void validate_structure(const Space& space, const LocalStructure& structure) {
  if (structure.depth() == 0) throw ConfigurationError("structure has no levels");
  for (int n = 1; n <= structure.depth(); ++n) {
    const Level& lv = structure.level(n);
    const std::string tag = "level " + std::to_string(n);
    if (lv.ids.empty()) throw ConfigurationError(tag + ": empty Omega_n");
    if (lv.mask.size() != space.size()) throw ConfigurationError(tag + ": mask size mismatch");
    if (!(lv.eps > 0.0)) throw ConfigurationError(tag + ": eps must be positive");
    if (!(lv.B >= 1.0)) throw ConfigurationError(tag + ": B must be >= 1");
    if (!(lv.C > 1.0)) throw ConfigurationError(tag + ": C must be > 1");
  }
}

namespace {

struct TriangleStats {
  double ratio = 0.0;
  Id x = -1, y = -1, z = -1;
  std::int64_t count = 0;
};

void consider(TriangleStats& s, const Space& sp, Id x, Id y, Id z) {
  const double den = sp.dist(x, z) + sp.dist(z, y);
  ++s.count;
  if (den == 0.0) return;
  const double r = sp.dist(x, y) / den;
  if (r > s.ratio) s = {r, x, y, z, s.count};
}

TriangleStats triangle_exhaustive(const Space& sp, const IdSet& ids) {
  const auto m = static_cast<std::int64_t>(ids.size());
  std::vector<TriangleStats> per(static_cast<std::size_t>(m));
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t a = 0; a < m; ++a) {
    TriangleStats s;
    for (Id y : ids)
      for (Id z : ids) consider(s, sp, ids[static_cast<std::size_t>(a)], y, z);
    per[static_cast<std::size_t>(a)] = s;
  }
  TriangleStats total;
  for (const auto& s : per) {
    if (s.ratio > total.ratio) total = {s.ratio, s.x, s.y, s.z, 0};
    total.count += s.count;
  }
  return total;
}

TriangleStats triangle_sampled(const Space& sp, const IdSet& ids, std::int64_t budget,
                               std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
  TriangleStats s;
  for (std::int64_t t = 0; t < budget; ++t) {
    const Id x = ids[pick(rng)], y = ids[pick(rng)], z = ids[pick(rng)];
    consider(s, sp, x, y, z);
  }
  return s;
}

}  // namespace

VerificationReport verify_axioms(const Space& space, const LocalStructure& structure,
                                 std::int64_t sample_budget, std::uint64_t seed) {
  validate_structure(space, structure);
  VerificationReport rep;
  rep.check = "axioms";
  rep.anchor = "exhaustion enlargement, quasi-triangle inequality, local doubling";
  std::mt19937_64 rng(seed);
  const int L = structure.depth();
  const double tol = 1.0 + 4 * DBL_EPSILON;

  bool nested = true, eps_ok = true, B_ok = true, C_ok = true;
  for (int n = 1; n < L; ++n) {
    const Level& a = structure.level(n);
    const Level& b = structure.level(n + 1);
    for (Id i : a.ids) nested = nested && b.contains(i);
    eps_ok = eps_ok && b.eps <= a.eps;
    B_ok = B_ok && b.B >= a.B;
    C_ok = C_ok && b.C >= a.C;
  }
  const bool union_all = structure.level(L).ids.size() == space.size();
  rep.data["structure"] = {{"nested", nested},
                           {"union_is_all", union_all},
                           {"eps_nonincreasing", eps_ok},
                           {"B_nondecreasing", B_ok},
                           {"C_nondecreasing", C_ok}};
  rep.pass = nested && union_all && eps_ok && B_ok && C_ok;

  Json levels = Json::array();
  for (int n = 1; n <= L; ++n) {
    const Level& lv = structure.level(n);
    Json J;
    J["n"] = n;
    J["size"] = lv.ids.size();
    J["eps"] = lv.eps;
    J["B"] = lv.B;
    J["C"] = lv.C;

    // Exhaustion: every point within 2 eps_n of Ω_n lies in Ω_{n+1}.
    if (n < L) {
      const Level& next = structure.level(n + 1);
      double gap = kInf;
      Id witness = -1;
      for (Id y = 0; y < static_cast<Id>(space.size()); ++y) {
        if (next.contains(y)) continue;
        for (Id x : lv.ids) {
          const double d = space.dist(x, y);
          if (d < gap) {
            gap = d;
            witness = y;
          }
        }
      }
      const bool ok = !(gap < 2.0 * lv.eps);
      J["exhaustion"] = {{"checked", true}, {"min_gap", jnum(gap)}, {"required", 2.0 * lv.eps},
                         {"pass", ok}, {"witness", witness}};
      rep.pass = rep.pass && ok;
    } else {
      J["exhaustion"] = {{"checked", false}, {"pass", true}};
    }

    // Quasi-triangle inequality on Ω_n.
    const auto m = static_cast<std::int64_t>(lv.ids.size());
    const bool tri_exhaustive = m <= 2'000'000 && m * m * m <= sample_budget;
    const TriangleStats tri = tri_exhaustive ? triangle_exhaustive(space, lv.ids)
                                             : triangle_sampled(space, lv.ids, sample_budget, rng);
    const bool tri_ok = tri.ratio <= lv.B * tol;
    J["quasi_triangle"] = {{"B_hat", tri.ratio},
                           {"triples", tri.count},
                           {"exhaustive", tri_exhaustive},
                           {"pass", tri_ok},
                           {"witness", {tri.x, tri.y, tri.z}}};
    rep.pass = rep.pass && tri_ok;

    // Local doubling on Ω_n for 0 < r <= eps_n.
    std::vector<std::vector<double>> bps(lv.ids.size());
    std::int64_t pairs = 0;
    for (std::size_t k = 0; k < lv.ids.size(); ++k) {
      bps[k] = ball_ratio_breakpoints(space, lv.ids[k], 2.0, lv.eps);
      pairs += static_cast<std::int64_t>(bps[k].size());
    }
    const bool dbl_exhaustive = pairs <= sample_budget;
    double c_hat = 0.0, c_r = 0.0;
    Id c_x = -1;
    bool positive = true;
    std::int64_t evaluated = 0;
    auto eval_pair = [&](std::size_t k, double r, const RadialProfile& prof) {
      const double small = prof.mass_below(r);
      const double big = prof.mass_below(2.0 * r);
      positive = positive && small > 0.0;
      ++evaluated;
      const double ratio = big / small;
      if (ratio > c_hat) {
        c_hat = ratio;
        c_r = r;
        c_x = lv.ids[k];
      }
    };
    const double cap = 2.0 * lv.eps * tol + DBL_MIN;
    if (dbl_exhaustive) {
      for (std::size_t k = 0; k < lv.ids.size(); ++k) {
        const RadialProfile prof(space, lv.ids[k], cap);
        for (double r : bps[k]) eval_pair(k, r, prof);
      }
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, lv.ids.size() - 1);
      std::vector<std::optional<RadialProfile>> profiles(lv.ids.size());
      for (std::int64_t t = 0; t < sample_budget; ++t) {
        const std::size_t k = pick(rng);
        std::uniform_int_distribution<std::size_t> pr(0, bps[k].size() - 1);
        const double r = bps[k][pr(rng)];
        if (!profiles[k]) profiles[k].emplace(space, lv.ids[k], cap);
        eval_pair(k, r, *profiles[k]);
      }
    }
    const bool dbl_ok = positive && c_hat <= lv.C * tol;
    J["doubling"] = {{"C_hat", c_hat},
                     {"pairs", evaluated},
                     {"exhaustive", dbl_exhaustive},
                     {"all_balls_positive", positive},
                     {"pass", dbl_ok},
                     {"witness", {{"x", c_x}, {"r", c_r}}}};
    rep.pass = rep.pass && dbl_ok;
    levels.push_back(std::move(J));
  }
  rep.data["levels"] = std::move(levels);
  return rep;
}

namespace {

struct BoxGrid {
  int dim;
  std::size_t side;
};

// Offsets of the nested boxes from the domain edges: 1/4, 1/8, 1/16, ... and
// 0 for the last level (the whole domain).
std::vector<double> level_offsets(int levels) {
  std::vector<double> off(static_cast<std::size_t>(levels));
  for (int n = 1; n <= levels; ++n) {
    off[static_cast<std::size_t>(n - 1)] = n == levels ? 0.0 : std::ldexp(1.0, -(n + 1));
  }
  return off;
}

Instance build_grid(const std::string& name, const BoxGrid& g, double exponent,
                    const std::string& profile, int levels) {
  if (levels < 3) throw ArgumentError("at least 3 exhaustion levels are required");
  std::size_t n = 1;
  for (int d = 0; d < g.dim; ++d) n *= g.side;
  std::vector<double> coords(n * static_cast<std::size_t>(g.dim));
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rest = i;
    for (int d = 0; d < g.dim; ++d) {
      const std::size_t c = rest % g.side;
      rest /= g.side;
      coords[i * static_cast<std::size_t>(g.dim) + static_cast<std::size_t>(d)] =
          (static_cast<double>(c) + 0.5) / static_cast<double>(g.side);
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double w = 1.0;
    if (profile == "linear") {
      w = 1.0 + coords[i * static_cast<std::size_t>(g.dim)];
    } else if (profile != "uniform") {
      throw ArgumentError("unknown weight profile '" + profile + "'");
    }
    weights[i] = w;
    total += w;
  }
  if (profile == "uniform") {
    for (auto& w : weights) w = 1.0 / static_cast<double>(n);
  } else {
    for (auto& w : weights) w /= total;
  }

  Instance inst;
  inst.name = name;
  const Quasidistance rho{exponent};
  inst.space = Space(PointCloud(g.dim, coords, weights), rho);

  const auto off = level_offsets(levels);
  std::vector<Level> lv;
  for (int L = 1; L <= levels; ++L) {
    const double o = off[static_cast<std::size_t>(L - 1)];
    IdSet ids;
    for (std::size_t i = 0; i < n; ++i) {
      bool inside = true;
      for (int d = 0; d < g.dim; ++d) {
        const double c = coords[i * static_cast<std::size_t>(g.dim) + static_cast<std::size_t>(d)];
        inside = inside && (L == levels || (c > o && c < 1.0 - o));
      }
      if (inside) ids.push_back(static_cast<Id>(i));
    }
    if (ids.empty()) {
      throw ArgumentError(name + ": N too small to populate level " + std::to_string(L));
    }
    double eps;
    if (L < levels) {
      const double margin = o - off[static_cast<std::size_t>(L)];
      eps = 0.5 * std::pow(margin, exponent);
    } else {
      eps = lv.back().eps;
    }
    if (!lv.empty()) eps = std::min(eps, lv.back().eps);
    lv.push_back(make_level(n, std::move(ids), eps, rho.triangle_constant(), 2.0));
  }
  inst.structure = LocalStructure(std::move(lv));
  return inst;
}

// C_n from a full pre-pass of the doubling ratio with 25% headroom, made
// nondecreasing in n.
void calibrate_doubling(Instance& inst) {
  double running = 1.0;
  for (auto& lv : inst.structure.levels()) {
    double worst = 1.0;
    std::vector<double> per(lv.ids.size(), 1.0);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(lv.ids.size()); ++k) {
      per[static_cast<std::size_t>(k)] =
          max_ball_ratio(inst.space, lv.ids[static_cast<std::size_t>(k)], 2.0, lv.eps).ratio;
    }
    for (double v : per) worst = std::max(worst, v);
    running = std::max(running, 1.25 * worst);
    lv.C = std::max(running, 1.25);
  }
}

}  // namespace

Instance instantiate_builtin(const std::string& name, const BuiltinParams& p) {
  Instance inst;
  if (name == "tiny4") {
    inst.name = name;
    inst.space = Space(PointCloud(1, {0.1, 0.3, 0.5, 0.7}, {0.1, 0.2, 0.3, 0.4}), Quasidistance{1.0});
    std::vector<Level> lv;
    lv.push_back(make_level(4, {1, 2}, 0.625, 1.0, 2.0));
    for (int k = 0; k < 3; ++k) lv.push_back(make_level(4, {0, 1, 2, 3}, 0.625, 1.0, 2.0));
    inst.structure = LocalStructure(std::move(lv));
  } else if (name == "grid1d" || name == "power_rho_grid" || name == "weighted_grid") {
    const double s = name == "power_rho_grid" ? (p.exponent == 1.0 ? 2.0 : p.exponent) : p.exponent;
    const std::string profile =
        name == "weighted_grid" ? (p.weight_profile == "uniform" ? "linear" : p.weight_profile)
                                : p.weight_profile;
    if (p.N < 4) throw ArgumentError(name + ": N too small to form 3 nonempty levels");
    inst = build_grid(name, {1, p.N}, s, profile, p.levels);
  } else if (name == "grid2d") {
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(p.N))));
    if (side * side != p.N) throw ArgumentError("grid2d: N must be a perfect square");
    if (side < 4) throw ArgumentError("grid2d: N too small to form 3 nonempty levels");
    inst = build_grid(name, {2, side}, p.exponent, p.weight_profile, p.levels);
  } else {
    throw ArgumentError("unknown builtin space '" + name + "'");
  }
  calibrate_doubling(inst);
  return inst;
}

}  // namespace lhs
