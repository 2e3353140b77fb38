#include "lhs/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lhs/covering.hpp"
#include "lhs/error.hpp"
#include "lhs/kernels.hpp"
#include "lhs/reference.hpp"

namespace lhs {

namespace {

std::vector<double> abs_values(const SampledFunction& f) {
  auto v = f.effective();
  for (auto& x : v) x = std::fabs(x);
  return v;
}

void check_grid(std::span<const double> grid, double cap) {
  for (double r : grid) {
    if (!(r > 0.0) || r > cap) throw PreconditionError("radius grid exceeds r_n");
  }
}

}  // namespace

MaximalResult local_maximal(const Space& space, const LocalStructure& structure,
                            const SampledFunction& f, int n, std::span<const double> radius_grid) {
  const Level& lv = structure.level(n);
  const double cap = vitali_radius_cap(structure, n).r;
  check_grid(radius_grid, cap);
  const auto v = abs_values(f);
  kernels::BallScan scan;
  // Exact mode visits the balls {rho <= d} with d < cap; the cap itself
  // (r = r_n) realizes {rho < r_n}, which the largest such d already gives.
  scan.cap = cap;
  scan.radius_grid = radius_grid;
  const auto sup = kernels::max_average(space, lv.ids, scan, v, lv.mask);
  MaximalResult out;
  out.values.values = sup.value;
  out.values.support = lv.mask;
  out.cap_r = cap;
  out.candidate_count = sup.candidates;
  out.level = n;
  return out;
}

MaximalResult local_maximal_reference(const Space& space, const LocalStructure& structure,
                                      const SampledFunction& f, int n,
                                      std::span<const double> radius_grid) {
  const Level& lv = structure.level(n);
  const double cap = vitali_radius_cap(structure, n).r;
  check_grid(radius_grid, cap);
  const auto v = abs_values(f);
  MaximalResult out;
  out.values.values = reference::max_average(space, lv.ids, cap, radius_grid, v, lv.mask);
  out.values.support = lv.mask;
  out.cap_r = cap;
  out.level = n;
  return out;
}

double lp_norm(const Space& space, const SampledFunction& f, const IdSet& ids, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (Id i : ids) m = std::max(m, std::fabs(f(i)));
    return m;
  }
  double acc = 0.0;
  for (Id i : ids) acc += space.weight(i) * std::pow(std::fabs(f(i)), p);
  return std::pow(acc, 1.0 / p);
}

VerificationReport weak_type_check(const Space& space, const LocalStructure& structure,
                                   const SampledFunction& f, int n,
                                   std::span<const double> t_grid, double bound) {
  const Level& lv = structure.level(n);
  const Level& up = structure.level(n + 1);
  const auto M = local_maximal(space, structure, f, n);
  const double l1 = lp_norm(space, f, up.ids, 1.0);
  VerificationReport rep;
  rep.check = "weak_type";
  rep.anchor = "maximal theorem (b), weak (1,1)";
  Table t{"weak_type", {"t", "level_measure", "c_hat"}, {}};
  double worst = 0.0;
  for (double s : t_grid) {
    double m = 0.0;
    for (Id x : lv.ids) {
      if (M.values(x) > s) m += space.weight(x);
    }
    const double c = m == 0.0 ? 0.0 : safe_ratio(s * m, l1);
    worst = std::max(worst, c);
    t.rows.push_back({s, m, c});
  }
  rep.pass = std::isfinite(worst) && worst <= bound;
  rep.data["c_hat_max"] = jnum(worst);
  rep.data["bound"] = jnum(bound);
  rep.data["f_l1"] = l1;
  rep.data["cap_r"] = M.cap_r;
  rep.tables.push_back(std::move(t));
  return rep;
}

VerificationReport strong_type_check(const Space& space, const LocalStructure& structure,
                                     const SampledFunction& f, int n, double p) {
  if (!(p > 1.0)) throw ArgumentError("strong type needs p > 1; use weak_type_check for p = 1");
  const Level& lv = structure.level(n);
  const Level& up = structure.level(n + 1);
  const auto M = local_maximal(space, structure, f, n);
  const double num = lp_norm(space, M.values, lv.ids, p);
  const double den = lp_norm(space, f, up.ids, p);
  const double ratio = safe_ratio(num, den);
  VerificationReport rep;
  rep.check = "strong_type";
  rep.anchor = "maximal theorem (c), Lp bound";
  rep.pass = std::isfinite(ratio);
  rep.data["p"] = jnum(p);
  rep.data["Mf_norm"] = num;
  rep.data["f_norm"] = den;
  rep.data["ratio"] = jnum(ratio);
  return rep;
}

VerificationReport differentiation_check(const Space& space, const LocalStructure& structure,
                                         const SampledFunction& f, int n) {
  const Level& lv = structure.level(n);
  const auto M = local_maximal(space, structure, f, n);
  constexpr double ulp = std::numeric_limits<double>::epsilon();
  std::size_t violations = 0;
  double worst_gap = 0.0, proxy = 0.0;
  for (Id x : lv.ids) {
    const double fx = std::fabs(f(x));
    const double mx = M.values(x);
    const double tol = 4.0 * ulp * std::max(fx, mx);
    if (fx > mx + tol) ++violations;
    worst_gap = std::max(worst_gap, fx - mx);
    // Smallest nontrivial ball at x: x and its nearest neighbours.
    const auto nb = sorted_neighbors(space, x, M.cap_r);
    std::size_t e = 1;
    while (e < nb.size() && nb[e].d == nb[0].d) ++e;
    if (e < nb.size()) {
      const double d1 = nb[e].d;
      while (e < nb.size() && nb[e].d == d1) ++e;
    }
    double sw = 0.0, swf = 0.0;
    for (std::size_t j = 0; j < e; ++j) {
      sw += space.weight(nb[j].id);
      swf += space.weight(nb[j].id) * f(nb[j].id);
    }
    proxy = std::max(proxy, std::fabs(swf / sw - f(x)));
  }
  VerificationReport rep;
  rep.check = "differentiation";
  rep.anchor = "Lebesgue differentiation, |f| <= Mf";
  rep.pass = violations == 0;
  rep.data["violations"] = violations;
  rep.data["max_f_minus_Mf"] = worst_gap;
  rep.data["smallest_ball_deviation"] = proxy;
  return rep;
}

}  // namespace lhs
