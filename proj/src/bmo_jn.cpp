#include "lhs/bmo_jn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lhs/covering.hpp"
#include "lhs/error.hpp"
#include "lhs/kernels.hpp"

namespace lhs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// sup_t t mu({M > t}) / mu(S): approached as t -> v_k from below, where v_k
// runs over the values of M.
double weak_constant(const Space& space, const IdSet& S, const std::vector<double>& M, double mS) {
  std::vector<std::pair<double, double>> vw;
  for (Id x : S) vw.emplace_back(M[static_cast<std::size_t>(x)], space.weight(x));
  std::sort(vw.begin(), vw.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  double cum = 0.0, best = 0.0;
  for (std::size_t i = 0; i < vw.size(); ++i) {
    cum += vw[i].second;
    const bool last_of_value = i + 1 == vw.size() || vw[i + 1].first != vw[i].first;
    if (last_of_value) best = std::max(best, vw[i].first * cum / mS);
  }
  return best;
}

struct Build {
  std::vector<JNNode> nodes;
  std::vector<std::vector<int>> levels;
  double max_A = 0.0;
  double max_c = 1.0;
  bool nested = true;
};

struct Ctx {
  const Space& space;
  const std::vector<double>& g;
  double K;
  double alpha;
  int steps;
};

double mean_over(const Space& space, const std::vector<double>& g, const IdSet& ids) {
  double sw = 0.0, s = 0.0;
  for (Id y : ids) {
    sw += space.weight(y);
    s += space.weight(y) * g[static_cast<std::size_t>(y)];
  }
  return s / sw;
}

// Expands one node; returns the child balls.
std::vector<BallRef> expand(const Ctx& cx, JNNode& node, double lambda0, double c_used,
                            Build& out) {
  const Space& sp = cx.space;
  const IdSet pts = ball(sp, node.ball.center, node.ball.radius);
  node.points = pts.size();
  node.mass = measure(sp, pts);
  node.mean = mean_over(sp, cx.g, pts);
  if (pts.size() <= 2) {
    node.terminated = "few_points";
    return {};
  }
  const IdSet big = ball(sp, node.ball.center, cx.alpha * node.ball.radius);
  const Mask big_mask = ids_to_mask(sp.size(), big);
  const Mask s_mask = ids_to_mask(sp.size(), pts);
  std::vector<double> h(sp.size());
  for (std::size_t y = 0; y < sp.size(); ++y) h[y] = std::fabs(cx.g[y] - node.mean);

  kernels::BallScan scan;
  scan.cap = kInf;
  scan.within = &big_mask;
  const auto M = kernels::max_average(sp, big, scan, h, s_mask).value;
  node.A_hat = weak_constant(sp, pts, M, node.mass);

  double c_hat = 1.0;
  for (Id x : pts) c_hat = std::max(c_hat, max_ball_ratio(sp, x, 3.0 * cx.K, node.ball.radius / 5.0).ratio);

  IdSet U;
  for (Id x : pts) {
    if (M[static_cast<std::size_t>(x)] > lambda0) U.push_back(x);
  }
  node.U_mass = measure(sp, U);
  std::vector<BallRef> kids;
  if (U.empty()) {
    node.terminated = "empty_U";
  } else {
    if (U.size() == pts.size()) {
      throw ConstructionError("U fills the ball: mu(U) <= A / lambda0 mu(S) fails (A = " +
                              std::to_string(node.A_hat) + ", lambda0 = " + std::to_string(lambda0) + ")");
    }
    const Mask u_mask = ids_to_mask(sp.size(), U);
    std::vector<BallSpec> cand;
    for (Id x : U) {
      double d = kInf;
      for (std::size_t y = 0; y < sp.size(); ++y) {
        if (!u_mask[y]) d = std::min(d, sp.dist(x, static_cast<Id>(y)));
      }
      cand.push_back({x, d / (2.0 * cx.K)});
    }
    Mask covered(sp.size(), 0);
    double child_mass = 0.0;
    for (std::size_t j : greedy_disjoint_select(sp, cand)) {
      const BallRef child{cand[j].center, cx.K * cand[j].radius};
      const IdSet cm = ball(sp, child.center, child.radius);
      const double mc = measure(sp, cm);
      child_mass += mc;
      for (Id y : cm) {
        covered[static_cast<std::size_t>(y)] = 1;
        out.nested = out.nested && s_mask[static_cast<std::size_t>(y)];
      }
      c_hat = std::max(c_hat, measure(sp, ball(sp, child.center, 3.0 * child.radius)) / mc);
      c_hat = std::max(c_hat, mc / measure(sp, ball(sp, cand[j].center, cand[j].radius)));
      node.mean_drift = node.mean_drift &&
                        std::fabs(node.mean - mean_over(sp, cx.g, cm)) <= c_used * lambda0;
      kids.push_back(child);
    }
    for (Id x : pts) {
      if (h[static_cast<std::size_t>(x)] > lambda0 && !covered[static_cast<std::size_t>(x)]) {
        node.superlevel_covered = false;
      }
    }
    node.halving = child_mass <= 0.5 * node.mass * (1.0 + 1e-12);
  }
  node.c_hat = c_hat;
  out.max_A = std::max(out.max_A, node.A_hat);
  out.max_c = std::max(out.max_c, c_hat);
  return kids;
}

Build build_tree(const Ctx& cx, BallRef base, double lambda0, double c_used) {
  Build b;
  b.nodes.push_back(JNNode{});
  b.nodes[0].ball = base;
  b.levels.push_back({0});
  for (int d = 1; d <= cx.steps; ++d) {
    std::vector<int> next;
    for (int idx : b.levels[static_cast<std::size_t>(d - 1)]) {
      const auto kids = expand(cx, b.nodes[static_cast<std::size_t>(idx)], lambda0, c_used, b);
      for (const auto& k : kids) {
        JNNode child;
        child.ball = k;
        child.parent = idx;
        const int ci = static_cast<int>(b.nodes.size());
        b.nodes[static_cast<std::size_t>(idx)].children.push_back(ci);
        b.nodes.push_back(std::move(child));
        next.push_back(ci);
      }
    }
    b.levels.push_back(std::move(next));
  }
  // Leaves of the last step are recorded but not expanded.
  for (int idx : b.levels.back()) {
    JNNode& nd = b.nodes[static_cast<std::size_t>(idx)];
    const IdSet pts = ball(cx.space, nd.ball.center, nd.ball.radius);
    nd.points = pts.size();
    nd.mass = measure(cx.space, pts);
    nd.mean = mean_over(cx.space, cx.g, pts);
    nd.terminated = "depth";
  }
  return b;
}

}  // namespace

SeminormResult oscillation_sup(const Space& space, const LocalStructure& structure,
                               const SampledFunction& f, int n, double p, double cap) {
  const Level& lv = structure.level(n);
  kernels::BallScan scan;
  scan.cap = cap;
  const auto v = f.effective();
  const Mask* inside = structure.has(n + 1) ? &structure.level(n + 1).mask : nullptr;
  const auto g = kernels::sup_oscillation(space, lv.ids, scan, v, p, inside);
  if (!g.contained) throw GeometryError("a ball of the seminorm leaves level n + 1");
  return {g.value, g.center, g.radius, g.candidates};
}

SeminormResult bmo_seminorm(const Space& space, const LocalStructure& structure,
                            const SampledFunction& f, int n) {
  return oscillation_sup(space, structure, f, n, 1.0, 2.0 * structure.level(n).eps);
}

SeminormResult bmo_p_seminorm(const Space& space, const LocalStructure& structure,
                              const SampledFunction& f, int n, double p) {
  if (!(p > 1.0)) throw ArgumentError("BMO^p needs p > 1");
  return oscillation_sup(space, structure, f, n, p, jn_radius_cap(structure, n).R);
}

JNRadius jn_radius_cap(const LocalStructure& structure, int n) {
  const double eps = structure.level(n).eps;
  const double B = structure.level(n + 1).B;
  JNRadius r;
  r.K = 2.0 * B + 3.0 * B * B;
  r.alpha = B * (1.5 * r.K + 1.0);
  r.R = 2.0 * eps / (B * (4.5 * B * B + 3.0 * B + 1.0));
  return r;
}

double gamma_form_constant(double p, double b) {
  if (!(b > 0.0)) return kInf;
  return std::pow(2.0 * p * std::tgamma(p) / std::pow(b, p), 1.0 / p);
}

BallRef default_jn_ball(const Space& space, const LocalStructure& structure, int n,
                        std::span<const double> near) {
  const Level& lv = structure.level(n);
  Id c = lv.ids[lv.ids.size() / 2];
  if (!near.empty()) {
    double bd = kInf;
    for (Id x : lv.ids) {
      const double d = space.rho()(space.cloud().coords(x), near);
      if (d < bd) {
        bd = d;
        c = x;
      }
    }
  }
  return {c, jn_radius_cap(structure, n).R};
}

JNTree jn_construct(const Space& space, const LocalStructure& structure, const SampledFunction& f,
                    int n, BallRef S, int steps, double lambda0_override) {
  const Level& lv = structure.level(n);
  const JNRadius jr = jn_radius_cap(structure, n);
  space.require_id(S.center);
  if (!lv.contains(S.center)) throw PreconditionError("ball center outside the level");
  if (!(S.radius > 0.0) || S.radius > jr.R) throw PreconditionError("ball radius exceeds R_n");
  if (steps < 1) throw ArgumentError("at least one step is required");

  JNTree T;
  T.base = S;
  T.seminorm = bmo_seminorm(space, structure, f, n).value;
  auto& rep = T.report;
  rep.check = "john_nirenberg_construction";
  rep.anchor = "John-Nirenberg iterative ball construction";

  std::vector<double> g = f.effective();
  const IdSet base_pts = ball(space, S.center, S.radius);
  const double mS = measure(space, base_pts);
  if (T.seminorm == 0.0) {
    JNNode root;
    root.ball = S;
    root.points = base_pts.size();
    root.mass = mS;
    root.mean = mean_over(space, g, base_pts);
    root.terminated = "empty_U";
    T.nodes.push_back(root);
    T.levels.push_back({0});
    for (int N = 1; N <= steps; ++N) {
      T.tail_mass.push_back(0.0);
      T.tail_bound.push_back(std::ldexp(mS, -N));
    }
  } else {
    for (auto& v : g) v /= T.seminorm;
    const Ctx cx{space, g, jr.K, jr.alpha, steps};
    double c = 1.0;
    double lambda0 = lambda0_override > 0.0 ? lambda0_override / T.seminorm : 0.0;
    if (lambda0_override <= 0.0) {
      // Seed with the root's own constants.
      Build probe = build_tree(Ctx{space, g, jr.K, jr.alpha, 1}, S, kInf, 1.0);
      c = probe.max_c;
      lambda0 = 2.0 * c * probe.max_A;
    }
    Build b;
    for (int it = 1; it <= 16; ++it) {
      b = build_tree(cx, S, lambda0, c);
      T.iterations = it;
      const double want = lambda0_override > 0.0 ? lambda0 : 2.0 * b.max_c * b.max_A;
      if (b.max_c <= c && want <= lambda0) break;
      c = std::max(c, b.max_c);
      lambda0 = std::max(lambda0, want);
    }
    T.nodes = std::move(b.nodes);
    T.levels = std::move(b.levels);
    T.nested = b.nested;
    T.c = c;
    T.A = b.max_A;
    const double lambda1 = c * lambda0;
    const double fS = mean_over(space, g, base_pts);
    for (int N = 1; N <= steps; ++N) {
      double m = 0.0;
      for (Id x : base_pts) {
        if (std::fabs(g[static_cast<std::size_t>(x)] - fS) > N * lambda1) m += space.weight(x);
      }
      T.tail_mass.push_back(m);
      T.tail_bound.push_back(std::ldexp(mS, -N));
    }
    T.lambda0 = lambda0 * T.seminorm;
    T.lambda1 = lambda1 * T.seminorm;
    for (auto& nd : T.nodes) nd.mean *= T.seminorm;
  }

  bool i_ok = true, ii_ok = true, iii_ok = true, tail_ok = true;
  for (const auto& nd : T.nodes) {
    i_ok = i_ok && nd.superlevel_covered;
    ii_ok = ii_ok && nd.halving;
    iii_ok = iii_ok && nd.mean_drift;
  }
  Table tail{"tail", {"N", "mass", "bound"}, {}};
  for (std::size_t i = 0; i < T.tail_mass.size(); ++i) {
    tail_ok = tail_ok && T.tail_mass[i] <= T.tail_bound[i];
    tail.rows.push_back({static_cast<double>(i + 1), T.tail_mass[i], T.tail_bound[i]});
  }
  Table nodes{"nodes", {"step", "center", "radius", "points", "mass", "A_hat", "c_hat", "U_mass", "children"}, {}};
  for (std::size_t d = 0; d < T.levels.size(); ++d) {
    for (int idx : T.levels[d]) {
      const auto& nd = T.nodes[static_cast<std::size_t>(idx)];
      nodes.rows.push_back({static_cast<double>(d), static_cast<double>(nd.ball.center), nd.ball.radius,
                            static_cast<double>(nd.points), nd.mass, nd.A_hat, nd.c_hat, nd.U_mass,
                            static_cast<double>(nd.children.size())});
    }
  }
  rep.pass = T.nested && i_ok && ii_ok && iii_ok && tail_ok;
  auto& D = rep.data;
  D["n"] = n;
  D["center"] = S.center;
  D["radius"] = S.radius;
  D["steps"] = steps;
  D["seminorm"] = T.seminorm;
  D["lambda0"] = jnum(T.lambda0);
  D["lambda1"] = jnum(T.lambda1);
  D["c"] = jnum(T.c);
  D["A"] = jnum(T.A);
  D["K_n"] = jr.K;
  D["alpha_n"] = jr.alpha;
  D["iterations"] = T.iterations;
  D["nodes"] = T.nodes.size();
  D["properties"] = {{"nested", T.nested},
                     {"superlevel_covered", i_ok},
                     {"halving", ii_ok},
                     {"mean_drift", iii_ok},
                     {"tail_bound", tail_ok}};
  rep.tables.push_back(std::move(tail));
  rep.tables.push_back(std::move(nodes));
  return T;
}

JNDistribution jn_verify(const Space& space, const LocalStructure& structure,
                         const SampledFunction& f, int n, BallRef S,
                         std::span<const double> lambda_grid) {
  const Level& lv = structure.level(n);
  const JNRadius jr = jn_radius_cap(structure, n);
  space.require_id(S.center);
  if (!lv.contains(S.center)) throw PreconditionError("ball center outside the level");
  if (!(S.radius > 0.0) || S.radius > jr.R) throw PreconditionError("ball radius exceeds R_n");

  JNDistribution out;
  out.seminorm = bmo_seminorm(space, structure, f, n).value;
  const IdSet pts = ball(space, S.center, S.radius);
  out.mass = measure(space, pts);
  const double fS = average(space, f, pts);
  std::vector<std::pair<double, double>> dev;
  double maxdev = 0.0;
  for (Id x : pts) {
    dev.emplace_back(std::fabs(f(x) - fS), space.weight(x));
    maxdev = std::max(maxdev, dev.back().first);
  }
  auto D = [&](double l) {
    double m = 0.0;
    for (const auto& [v, w] : dev) {
      if (v > l) m += w;
    }
    return m;
  };
  auto b_over = [&](const std::vector<double>& grid) {
    double b = kInf;
    for (double l : grid) {
      const double d = D(l);
      if (d > 0.0 && l > 0.0) b = std::min(b, out.seminorm / l * std::log(2.0 * out.mass / d));
    }
    return b;
  };

  std::vector<double> grid(lambda_grid.begin(), lambda_grid.end());
  if (grid.empty() && maxdev > 0.0 && out.seminorm > 0.0) {
    const double lo = std::min(0.05 * out.seminorm, 0.5 * maxdev);
    for (int i = 0; i < 64; ++i) grid.push_back(lo * std::pow(maxdev / lo, i / 63.0));
  }
  std::vector<double> refined;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    refined.push_back(grid[i]);
    if (i + 1 < grid.size()) refined.push_back(std::sqrt(grid[i] * grid[i + 1]));
  }

  if (out.seminorm == 0.0 || maxdev == 0.0) {
    out.b_hat = out.b_hat_refined = out.b_exact = kInf;
  } else {
    out.b_hat = b_over(grid);
    out.b_hat_refined = b_over(refined);
    // Exact infimum: on each interval where D is constant the expression
    // decreases in lambda, so the inf is the limit at the jump from below.
    std::sort(dev.begin(), dev.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    double cum = 0.0;
    out.b_exact = kInf;
    for (std::size_t i = 0; i < dev.size(); ++i) {
      cum += dev[i].second;
      const bool last = i + 1 == dev.size() || dev[i + 1].first != dev[i].first;
      if (last && dev[i].first > 0.0) {
        out.b_exact = std::min(out.b_exact, out.seminorm / dev[i].first * std::log(2.0 * out.mass / cum));
      }
    }
  }

  auto& rep = out.report;
  rep.check = "john_nirenberg_distribution";
  rep.anchor = "John-Nirenberg inequality";
  rep.pass = out.b_hat > 0.0;
  Table t{"distribution", {"lambda", "D", "bound"}, {}};
  for (double l : grid) {
    const double bound = std::isfinite(out.b_hat)
                             ? 2.0 * std::exp(-out.b_hat * l / out.seminorm) * out.mass
                             : 0.0;
    t.rows.push_back({l, D(l), bound});
  }
  const double change = std::isfinite(out.b_hat) && out.b_hat > 0.0
                            ? std::fabs(out.b_hat - out.b_hat_refined) / out.b_hat
                            : 0.0;
  rep.data["n"] = n;
  rep.data["center"] = S.center;
  rep.data["radius"] = S.radius;
  rep.data["seminorm"] = out.seminorm;
  rep.data["mass"] = out.mass;
  rep.data["b_hat"] = jnum(out.b_hat);
  rep.data["b_hat_refined"] = jnum(out.b_hat_refined);
  rep.data["b_exact"] = jnum(out.b_exact);
  rep.data["refinement_change"] = change;
  rep.tables.push_back(std::move(t));
  return out;
}

VerificationReport bmo_equiv_check(const Space& space, const LocalStructure& structure,
                                   const SampledFunction& f, int n, double p) {
  const auto s1 = bmo_seminorm(space, structure, f, n);
  const auto sp = bmo_p_seminorm(space, structure, f, n, p);
  const double ratio = safe_ratio(sp.value, s1.value);
  double b = kInf;
  if (sp.value > 0.0) {
    const BallRef S{sp.center, std::nextafter(sp.radius, kInf)};
    b = jn_verify(space, structure, f, n, S).b_exact;
  }
  const double bound = gamma_form_constant(p, b);
  VerificationReport rep;
  rep.check = "bmo_equivalence";
  rep.anchor = "BMO^p equivalence via John-Nirenberg";
  const bool b_available = std::isfinite(b) && b > 0.0;
  const bool dominated = b_available && ratio <= bound * 1.05;
  rep.pass = b_available ? dominated : std::isfinite(ratio);
  rep.data["p"] = p;
  rep.data["bmo"] = s1.value;
  rep.data["bmo_p"] = sp.value;
  rep.data["ratio"] = jnum(ratio);
  rep.data["b_hat"] = jnum(b);
  rep.data["gamma_constant"] = jnum(bound);
  rep.data["dominated"] = dominated;
  rep.data["witness_center"] = sp.center;
  rep.data["witness_radius"] = sp.radius;
  return rep;
}

}  // namespace lhs
