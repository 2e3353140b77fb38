#include "lhs/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lhs/error.hpp"

namespace lhs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Id nearest(const Space& space, Id x, const std::vector<Id>& centers) {
  Id best = -1;
  double bd = kInf;
  for (Id c : centers) {
    const double d = space.dist(x, c);
    if (d < bd || (d == bd && c < best)) {
      bd = d;
      best = c;
    }
  }
  return best;
}

}  // namespace

double DyadicForest::scale(int k) const { return std::pow(delta, k); }

const Cube& DyadicForest::cube(Id id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= cubes.size()) {
    throw ArgumentError("unknown cube id " + std::to_string(id));
  }
  return cubes[static_cast<std::size_t>(id)];
}

Id DyadicForest::cube_containing(Id x, int k) const {
  if (k < 1 || k > depth) throw ArgumentError("generation out of range");
  return cube_of[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(x)];
}

DyadicForest build_forest(const Space& space, const LocalStructure& structure, int n,
                          double delta, int depth) {
  if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("delta must lie in (0, 1)");
  if (depth < 1) throw ArgumentError("depth must be at least 1");
  const Level& lv = structure.level(n);
  if (lv.ids.empty()) throw ScaleError("empty level");

  DyadicForest F;
  F.n = n;
  F.delta = delta;
  F.depth = depth;
  F.points = lv.ids;

  // Nested greedy nets: generation k + 1 keeps every generation-k center.
  std::vector<std::vector<Id>> nets(static_cast<std::size_t>(depth));
  Mask is_center(space.size(), 0);
  std::vector<Id> current;
  for (int k = 1; k <= depth; ++k) {
    const double s = F.scale(k);
    for (Id x : lv.ids) {
      if (is_center[static_cast<std::size_t>(x)]) continue;
      bool separated = true;
      for (Id c : current) {
        if (space.dist(x, c) < s) {
          separated = false;
          break;
        }
      }
      if (separated) {
        current.push_back(x);
        is_center[static_cast<std::size_t>(x)] = 1;
      }
    }
    if (current.empty()) throw ScaleError("empty net at generation " + std::to_string(k));
    auto net = current;
    std::sort(net.begin(), net.end());
    nets[static_cast<std::size_t>(k - 1)] = std::move(net);
  }

  // Cube ids: generation by generation, centers ascending.
  std::vector<std::vector<Id>> cube_at_center(static_cast<std::size_t>(depth),
                                              std::vector<Id>(space.size(), -1));
  F.generations.resize(static_cast<std::size_t>(depth));
  for (int k = 1; k <= depth; ++k) {
    for (Id c : nets[static_cast<std::size_t>(k - 1)]) {
      Cube q;
      q.id = static_cast<Id>(F.cubes.size());
      q.gen = k;
      q.center = c;
      cube_at_center[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(c)] = q.id;
      F.generations[static_cast<std::size_t>(k - 1)].push_back(q.id);
      F.cubes.push_back(std::move(q));
    }
  }
  for (int k = 2; k <= depth; ++k) {
    const auto& coarse = nets[static_cast<std::size_t>(k - 2)];
    for (Id qid : F.generations[static_cast<std::size_t>(k - 1)]) {
      Cube& q = F.cubes[static_cast<std::size_t>(qid)];
      const Id pc = nearest(space, q.center, coarse);
      q.parent = cube_at_center[static_cast<std::size_t>(k - 2)][static_cast<std::size_t>(pc)];
      F.cubes[static_cast<std::size_t>(q.parent)].children.push_back(qid);
    }
  }

  const auto& finest = nets.back();
  std::vector<Id> leaf(lv.ids.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(lv.ids.size()); ++i) {
    const Id x = lv.ids[static_cast<std::size_t>(i)];
    leaf[static_cast<std::size_t>(i)] =
        cube_at_center.back()[static_cast<std::size_t>(nearest(space, x, finest))];
  }
  F.cube_of.assign(static_cast<std::size_t>(depth), std::vector<Id>(space.size(), -1));
  for (std::size_t i = 0; i < lv.ids.size(); ++i) {
    const Id x = lv.ids[i];
    for (Id q = leaf[i]; q >= 0; q = F.cubes[static_cast<std::size_t>(q)].parent) {
      Cube& c = F.cubes[static_cast<std::size_t>(q)];
      c.members.push_back(x);
      F.cube_of[static_cast<std::size_t>(c.gen - 1)][static_cast<std::size_t>(x)] = q;
    }
  }
  for (auto& q : F.cubes) {
    if (q.members.empty()) throw ScaleError("empty cube at generation " + std::to_string(q.gen));
    q.mass = measure(space, q.members);
  }
  return F;
}

int atomic_depth(const Space& space, const LocalStructure& structure, int n, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("delta must lie in (0, 1)");
  const auto& ids = structure.level(n).ids;
  double md = kInf;
#pragma omp parallel for schedule(dynamic, 16) reduction(min : md)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(ids.size()); ++i) {
    for (std::size_t j = static_cast<std::size_t>(i) + 1; j < ids.size(); ++j) {
      md = std::min(md, space.dist(ids[static_cast<std::size_t>(i)], ids[j]));
    }
  }
  if (md == kInf) return 1;
  int k = 1;
  while (std::pow(delta, k) > md) ++k;
  return k;
}

Id ancestor(const DyadicForest& forest, Id cube, int k) {
  const Cube* q = &forest.cube(cube);
  if (k < 1 || k > q->gen) throw ArgumentError("ancestor generation out of range");
  while (q->gen > k) q = &forest.cube(q->parent);
  return q->id;
}

std::vector<Id> subcubes(const DyadicForest& forest, Id cube, int k) {
  const Cube& root = forest.cube(cube);
  if (k < root.gen || k > forest.depth) throw ArgumentError("subcube generation out of range");
  std::vector<Id> level{cube};
  for (int g = root.gen; g < k; ++g) {
    std::vector<Id> next;
    for (Id q : level) {
      const auto& ch = forest.cube(q).children;
      next.insert(next.end(), ch.begin(), ch.end());
    }
    level = std::move(next);
  }
  std::sort(level.begin(), level.end());
  return level;
}

ForestConstants forest_constants(const Space& space, const DyadicForest& forest) {
  const std::size_t nc = forest.cubes.size();
  std::vector<double> a0(nc, kInf), c1(nc, 0.0), pc(nc, 1.0);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(nc); ++i) {
    const Cube& q = forest.cubes[static_cast<std::size_t>(i)];
    const double s = forest.scale(q.gen);
    const auto& row = forest.cube_of[static_cast<std::size_t>(q.gen - 1)];
    double gap = kInf;
    for (Id y : forest.points) {
      if (row[static_cast<std::size_t>(y)] != q.id) gap = std::min(gap, space.dist(q.center, y));
    }
    a0[static_cast<std::size_t>(i)] = gap / s;
    double outer = 0.0;
    for (std::size_t a = 0; a < q.members.size(); ++a) {
      outer = std::max(outer, space.dist(q.center, q.members[a]));
      for (std::size_t b = a + 1; b < q.members.size(); ++b) {
        outer = std::max(outer, space.dist(q.members[a], q.members[b]));
      }
    }
    c1[static_cast<std::size_t>(i)] = outer / s;
    if (q.parent >= 0) pc[static_cast<std::size_t>(i)] = forest.cube(q.parent).mass / q.mass;
  }
  ForestConstants out;
  out.a0 = *std::min_element(a0.begin(), a0.end());
  out.c1 = *std::max_element(c1.begin(), c1.end());
  // Strict containment Q ⊂ B(z, c1 δ^k) needs c1 strictly above the extreme.
  out.c1 = out.c1 > 0.0 ? out.c1 * (1.0 + 1e-12) : std::numeric_limits<double>::min();
  out.parent_child = *std::max_element(pc.begin(), pc.end());
  return out;
}

std::vector<double> cube_triple_radii(const Space& space, const DyadicForest& forest, Id cube,
                                      Id x) {
  const Cube& q = forest.cube(cube);
  const double s = forest.scale(q.gen);
  std::vector<double> r{s};
  for (Id m : q.members) {
    const double d = space.dist(x, m);
    if (d > 0.0) {
      r.push_back(d);
      r.push_back(d / 2.0);
    }
  }
  for (std::size_t y = 0; y < space.size(); ++y) {
    const double d = space.dist(x, static_cast<Id>(y));
    if (d > 0.0 && d <= s) r.push_back(d);
  }
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

TripleRatios cube_triple_ratios(const Space& space, const DyadicForest& forest,
                                const CubeTriple& t) {
  const Cube& q = forest.cube(t.cube);
  const double s = forest.scale(q.gen);
  double in_r = 0.0, in_2r = 0.0;
  for (Id m : q.members) {
    const double d = space.dist(t.x, m);
    if (d < t.r) in_r += space.weight(m);
  }
  for (Id m : q.members) {
    if (space.dist(t.x, m) < 2.0 * t.r) in_2r += space.weight(m);
  }
  TripleRatios out{};
  out.doubling = in_2r / in_r;
  out.small_scale = t.r <= s;
  if (out.small_scale) {
    double whole = 0.0;
    for (std::size_t y = 0; y < space.size(); ++y) {
      if (space.dist(t.x, static_cast<Id>(y)) < t.r) whole += space.weight(static_cast<Id>(y));
    }
    out.lower = in_r / whole;
  } else {
    out.lower = in_r / q.mass;
  }
  return out;
}

VerificationReport verify_forest(const Space& space, const LocalStructure& structure,
                                 const DyadicForest& forest, std::int64_t sample_budget,
                                 std::uint64_t seed) {
  if (forest.cube_of.size() != static_cast<std::size_t>(forest.depth)) {
    throw ArgumentError("forest depth does not match its assignment table");
  }
  for (const auto& row : forest.cube_of) {
    if (row.size() != space.size()) throw ArgumentError("forest was built on another space");
  }
  if (!structure.has(forest.n) || structure.level(forest.n).ids != forest.points) {
    throw ArgumentError("forest does not match the level it claims");
  }

  VerificationReport rep;
  rep.check = "dyadic_forest";
  rep.anchor = "dyadic cubes (a)-(h)";
  const auto& pts = forest.points;

  // (b) members lie in Ω_{n+1}.
  bool b_ok = true;
  if (structure.has(forest.n + 1)) {
    const auto& up = structure.level(forest.n + 1);
    for (const auto& q : forest.cubes) {
      for (Id m : q.members) b_ok = b_ok && up.contains(m);
    }
  }

  // (c) parents at the previous generation contain their children.
  bool c_ok = true;
  for (const auto& q : forest.cubes) {
    if (q.gen == 1) {
      c_ok = c_ok && q.parent < 0;
      continue;
    }
    if (q.parent < 0) {
      c_ok = false;
      continue;
    }
    const Cube& p = forest.cube(q.parent);
    c_ok = c_ok && p.gen == q.gen - 1 &&
           std::includes(p.members.begin(), p.members.end(), q.members.begin(), q.members.end());
  }

  // (e) a finer cube is inside or disjoint from each coarser one: all its
  // members share one coarser cube, which is its ancestor.
  bool e_ok = true;
  for (const auto& q : forest.cubes) {
    for (int k = 1; k < q.gen; ++k) {
      const auto& row = forest.cube_of[static_cast<std::size_t>(k - 1)];
      const Id anc = ancestor(forest, q.id, k);
      for (Id m : q.members) e_ok = e_ok && row[static_cast<std::size_t>(m)] == anc;
    }
  }

  // (f) each generation partitions Ω_n; (g) every point has a cube at every
  // generation.
  bool f_ok = true, g_ok = true;
  for (int k = 1; k <= forest.depth; ++k) {
    std::size_t total = 0;
    for (Id qid : forest.generations[static_cast<std::size_t>(k - 1)]) {
      const Cube& q = forest.cube(qid);
      total += q.members.size();
      for (Id m : q.members) {
        f_ok = f_ok && forest.cube_of[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(m)] == qid;
      }
    }
    f_ok = f_ok && total == pts.size();
    for (Id x : pts) g_ok = g_ok && forest.cube_of[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(x)] >= 0;
  }
  f_ok = f_ok && forest.exceptional.empty();

  // Net invariants.
  bool separated = true, covering = true;
  for (int k = 1; k <= forest.depth; ++k) {
    const double s = forest.scale(k);
    const auto& gen = forest.generations[static_cast<std::size_t>(k - 1)];
    for (std::size_t a = 0; a < gen.size(); ++a) {
      for (std::size_t b = a + 1; b < gen.size(); ++b) {
        separated = separated && space.dist(forest.cube(gen[a]).center, forest.cube(gen[b]).center) >= s;
      }
    }
    for (Id x : pts) {
      bool near = false;
      for (Id qid : gen) {
        if (space.dist(x, forest.cube(qid).center) < s) {
          near = true;
          break;
        }
      }
      covering = covering && near;
    }
  }

  const ForestConstants fc = forest_constants(space, forest);
  const bool a_ok = fc.a0 > 0.0;
  const bool d_ok = std::isfinite(fc.c1);

  bool d_in_next2 = true;
  if (structure.has(forest.n + 2)) {
    const auto& lv2 = structure.level(forest.n + 2);
    for (const auto& q : forest.cubes) {
      for (Id y : ball(space, q.center, fc.c1 * forest.scale(q.gen))) d_in_next2 = d_in_next2 && lv2.contains(y);
    }
  }
  const bool scale_condition =
      structure.has(forest.n + 1) && fc.c1 * forest.delta < 2.0 * structure.level(forest.n + 1).eps;

  // (h) restricted doubling and lower bounds on (cube, x, r) triples.
  std::int64_t total_triples = 0;
  for (const auto& q : forest.cubes) {
    total_triples += static_cast<std::int64_t>(q.members.size()) *
                     static_cast<std::int64_t>(2 * q.members.size() + 1 + space.size());
  }
  const bool exhaustive = total_triples <= sample_budget;
  std::vector<CubeTriple> triples;
  if (exhaustive) {
    for (const auto& q : forest.cubes) {
      for (Id x : q.members) {
        for (double r : cube_triple_radii(space, forest, q.id, x)) triples.push_back({q.id, x, r});
      }
    }
  } else {
    std::mt19937_64 rng(seed);
    for (std::int64_t s = 0; s < sample_budget; ++s) {
      const auto qi = std::uniform_int_distribution<std::size_t>(0, forest.cubes.size() - 1)(rng);
      const Cube& q = forest.cubes[qi];
      const Id x = q.members[std::uniform_int_distribution<std::size_t>(0, q.members.size() - 1)(rng)];
      const auto radii = cube_triple_radii(space, forest, q.id, x);
      const double r = radii[std::uniform_int_distribution<std::size_t>(0, radii.size() - 1)(rng)];
      triples.push_back({q.id, x, r});
    }
  }
  std::vector<TripleRatios> ratios(triples.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(triples.size()); ++i) {
    ratios[static_cast<std::size_t>(i)] =
        cube_triple_ratios(space, forest, triples[static_cast<std::size_t>(i)]);
  }
  double c2 = 1.0, c0_small = kInf, c0_large = kInf;
  Table tt{"triples", {"cube", "x", "r", "doubling", "lower", "small_scale"}, {}};
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const auto& t = triples[i];
    const auto& q = ratios[i];
    c2 = std::max(c2, q.doubling);
    if (q.small_scale) {
      c0_small = std::min(c0_small, q.lower);
    } else {
      c0_large = std::min(c0_large, q.lower);
    }
    if (!exhaustive) {
      tt.rows.push_back({static_cast<double>(t.cube), static_cast<double>(t.x), t.r, q.doubling,
                         q.lower, q.small_scale ? 1.0 : 0.0});
    }
  }
  const double c0 = std::min(c0_small, c0_large);
  const bool h_ok = std::isfinite(c2) && c0 > 0.0;

  bool atomic = true;
  for (Id qid : forest.generations.back()) atomic = atomic && forest.cube(qid).members.size() == 1;

  rep.pass = a_ok && b_ok && c_ok && d_ok && e_ok && f_ok && g_ok && h_ok && separated && covering;
  auto& D = rep.data;
  D["n"] = forest.n;
  D["delta"] = forest.delta;
  D["depth"] = forest.depth;
  Json sizes = Json::array();
  for (const auto& g : forest.generations) sizes.push_back(g.size());
  D["generation_sizes"] = sizes;
  D["a0_hat"] = jnum(fc.a0);
  D["c1_hat"] = jnum(fc.c1);
  D["c2_hat"] = jnum(c2);
  D["c0_hat"] = jnum(c0);
  D["c0_small_scale"] = jnum(c0_small);
  D["c0_large_scale"] = jnum(c0_large);
  D["parent_child_ratio"] = jnum(fc.parent_child);
  D["properties"] = {{"a", a_ok}, {"b", b_ok}, {"c", c_ok}, {"d", d_ok}, {"e", e_ok},
                     {"f", f_ok}, {"g", g_ok}, {"h", h_ok}};
  D["net_separated"] = separated;
  D["net_covering"] = covering;
  D["finest_generation_atomic"] = atomic;
  D["outer_ball_in_level_n_plus_2"] = d_in_next2;
  D["scale_condition_c1_delta_lt_2eps"] = scale_condition;
  D["exhaustive"] = exhaustive;
  D["triples"] = triples.size();
  if (!exhaustive) rep.tables.push_back(std::move(tt));
  return rep;
}

}  // namespace lhs
