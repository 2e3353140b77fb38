#include "lhs/covering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lhs/error.hpp"

namespace lhs {

VitaliCap vitali_radius_cap(const LocalStructure& structure, int n) {
  const Level& lv = structure.level(n);
  const double B = structure.level(n + 1).B;
  VitaliCap c;
  c.K = 2.0 * B + 3.0 * B * B;
  c.r = 2.0 * lv.eps / c.K;
  return c;
}

std::vector<std::size_t> greedy_disjoint_select(const Space& space,
                                                const std::vector<BallSpec>& balls) {
  std::vector<std::size_t> order(balls.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (balls[a].radius != balls[b].radius) return balls[a].radius > balls[b].radius;
    return balls[a].center < balls[b].center;
  });
  Mask taken(space.size(), 0);
  std::vector<std::size_t> kept;
  for (std::size_t i : order) {
    const IdSet pts = ball(space, balls[i].center, balls[i].radius);
    const bool free = std::none_of(pts.begin(), pts.end(),
                                   [&](Id y) { return taken[static_cast<std::size_t>(y)] != 0; });
    if (!free) continue;
    for (Id y : pts) taken[static_cast<std::size_t>(y)] = 1;
    kept.push_back(i);
  }
  return kept;
}

VitaliResult vitali_select(const Space& space, const LocalStructure& structure,
                           const BallFamily& family, const IdSet& E) {
  const VitaliCap cap = vitali_radius_cap(structure, family.level);
  const Level& lv = structure.level(family.level);
  Mask in_union(space.size(), 0);
  for (const auto& b : family.balls) {
    space.require_id(b.center);
    if (!lv.contains(b.center)) throw PreconditionError("ball center outside the level");
    if (!(b.radius > 0.0) || b.radius > cap.r) throw PreconditionError("ball radius exceeds r_n");
    for (Id y : ball(space, b.center, b.radius)) in_union[static_cast<std::size_t>(y)] = 1;
  }
  for (Id e : E) {
    space.require_id(e);
    if (!in_union[static_cast<std::size_t>(e)]) {
      throw PreconditionError("E is not covered by the family");
    }
  }

  VitaliResult out;
  out.selected.level = family.level;
  for (std::size_t i : greedy_disjoint_select(space, family.balls)) {
    out.selected.balls.push_back(family.balls[i]);
  }

  // Exact checks on the selection.
  Mask seen(space.size(), 0);
  bool disjoint = true;
  double selected_mass = 0.0;
  Mask enlarged(space.size(), 0);
  for (const auto& b : out.selected.balls) {
    const IdSet pts = ball(space, b.center, b.radius);
    for (Id y : pts) {
      disjoint = disjoint && !seen[static_cast<std::size_t>(y)];
      seen[static_cast<std::size_t>(y)] = 1;
    }
    selected_mass += measure(space, pts);
    for (Id y : ball(space, b.center, cap.K * b.radius)) enlarged[static_cast<std::size_t>(y)] = 1;
  }
  std::size_t uncovered = 0;
  for (Id e : E) uncovered += enlarged[static_cast<std::size_t>(e)] ? 0 : 1;
  const double mE = measure(space, E);

  auto& rep = out.report;
  rep.check = "vitali_select";
  rep.anchor = "Vitali covering lemma";
  rep.pass = disjoint && uncovered == 0;
  rep.data["K_n"] = cap.K;
  rep.data["r_n"] = cap.r;
  rep.data["disjoint"] = disjoint;
  rep.data["uncovered"] = uncovered;
  rep.data["c_hat"] = jnum(safe_ratio(selected_mass, mE));
  rep.data["family_size"] = family.balls.size();
  Json sel = Json::array();
  for (const auto& b : out.selected.balls) sel.push_back({{"center", b.center}, {"radius", b.radius}});
  rep.data["selected"] = std::move(sel);
  return out;
}

FiniteCover finite_ball_cover(const Space& space, const LocalStructure& structure,
                              const DyadicForest& forest, int n, int k) {
  if (forest.n != n + 1) throw ArgumentError("the forest must be subordinated to level n + 1");
  if (k < 1 || k > forest.depth) throw ArgumentError("generation out of range");
  const Level& inner = structure.level(n);
  const Level& outer = structure.level(n + 1);
  const ForestConstants fc = forest_constants(space, forest);

  // Smallest generation whose core balls around cubes meeting Ω_n stay in
  // Ω_{n+1}.
  auto admissible = [&](int g) {
    for (Id qid : forest.generations[static_cast<std::size_t>(g - 1)]) {
      const Cube& q = forest.cube(qid);
      const bool meets = std::any_of(q.members.begin(), q.members.end(),
                                     [&](Id m) { return inner.contains(m); });
      if (!meets) continue;
      for (Id y : ball(space, q.center, fc.c1 * forest.scale(g))) {
        if (!outer.contains(y)) return false;
      }
    }
    return true;
  };
  if (!admissible(k)) {
    int kmin = forest.depth + 1;
    for (int g = k + 1; g <= forest.depth; ++g) {
      if (admissible(g)) {
        kmin = g;
        break;
      }
    }
    throw ScaleError("core balls leave level n + 1 at generation " + std::to_string(k) +
                     "; smallest admissible generation is " + std::to_string(kmin));
  }

  FiniteCover out;
  out.n = n;
  out.k = k;
  out.c1 = fc.c1;
  const double s = forest.scale(k);
  const auto& row = forest.cube_of[static_cast<std::size_t>(k - 1)];
  Mask covered(space.size(), 0);
  double c_prime = 0.0;
  bool region_in_enclosing = true;
  for (Id qid : forest.generations[static_cast<std::size_t>(k - 1)]) {
    const Cube& q = forest.cube(qid);
    if (std::none_of(q.members.begin(), q.members.end(), [&](Id m) { return inner.contains(m); })) {
      continue;
    }
    CoverPiece pc;
    pc.cube = qid;
    pc.center = q.center;
    pc.core_radius = fc.c1 * s;
    pc.core_ball = ball(space, q.center, pc.core_radius);
    for (Id y : pc.core_ball) {
      const Id c = row[static_cast<std::size_t>(y)];
      if (c >= 0) pc.region_cubes.push_back(c);
    }
    std::sort(pc.region_cubes.begin(), pc.region_cubes.end());
    pc.region_cubes.erase(std::unique(pc.region_cubes.begin(), pc.region_cubes.end()),
                          pc.region_cubes.end());
    for (Id c : pc.region_cubes) {
      const auto& mem = forest.cube(c).members;
      pc.region.insert(pc.region.end(), mem.begin(), mem.end());
    }
    std::sort(pc.region.begin(), pc.region.end());
    double far = 0.0;
    for (Id y : pc.region) far = std::max(far, space.dist(q.center, y));
    c_prime = std::max(c_prime, far / s);
    for (Id m : q.members) covered[static_cast<std::size_t>(m)] = 1;
    out.pieces.push_back(std::move(pc));
  }
  out.c_prime = c_prime * (1.0 + 1e-12);
  for (auto& pc : out.pieces) {
    pc.enclosing_radius = out.c_prime * s;
    for (Id y : pc.region) region_in_enclosing = region_in_enclosing && space.dist(pc.center, y) < pc.enclosing_radius;
  }
  out.gamma = out.c_prime / out.c1;
  std::size_t uncovered = 0;
  for (Id x : inner.ids) uncovered += covered[static_cast<std::size_t>(x)] ? 0 : 1;

  auto& rep = out.report;
  rep.check = "finite_ball_cover";
  rep.anchor = "covering lemma, finite ball cover of a level";
  rep.pass = uncovered == 0 && region_in_enclosing;
  rep.data["n"] = n;
  rep.data["k"] = k;
  rep.data["pieces"] = out.pieces.size();
  rep.data["c1_hat"] = jnum(out.c1);
  rep.data["c_prime"] = jnum(out.c_prime);
  rep.data["gamma"] = jnum(out.gamma);
  rep.data["uncovered"] = uncovered;
  rep.data["region_in_enclosing_ball"] = region_in_enclosing;
  return out;
}

}  // namespace lhs
