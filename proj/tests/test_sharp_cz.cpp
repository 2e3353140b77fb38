#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "lhs/error.hpp"
#include "lhs/functions.hpp"
#include "lhs/maximal.hpp"
#include "lhs/sharp_cz.hpp"

using namespace lhs;

namespace {

double avg_abs(const Space& S, const IdSet& m, const SampledFunction& f) {
  double w = 0.0, s = 0.0;
  for (Id y : m) {
    w += S.weight(y);
    s += S.weight(y) * std::fabs(f(y));
  }
  return s / w;
}

std::vector<Id> brute_cz(const Space& S, const DyadicForest& F, const SampledFunction& f, Id root,
                         double lambda) {
  std::vector<Id> out;
  for (Id q : cubes_below(F, root)) {
    if (!(avg_abs(S, F.cube(q).members, f) > lambda)) continue;
    bool first = true;
    for (Id a = F.cube(q).parent; first && q != root; a = F.cube(a).parent) {
      if (avg_abs(S, F.cube(a).members, f) > lambda) first = false;
      if (a == root) break;
    }
    if (first) out.push_back(q);
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct Setup {
  Instance I;
  DyadicForest F;
  Id root;
};

Setup setup(std::size_t N) {
  Setup s{fx::grid("grid1d", N), {}, -1};
  s.F = build_forest(s.I.space, s.I.structure, 1, 0.25, atomic_depth(s.I.space, s.I.structure, 1, 0.25));
  s.root = central_root(s.I.space, s.F, small_root_generation(s.I.space, s.I.structure, s.F));
  return s;
}

}  // namespace

TEST_CASE("dyadic sharp of a constant is zero") {
  auto s = setup(256);
  const auto d = dyadic_sharp(s.I.space, s.F, SampledFunction::constant(256, 4.0), s.F.generations[0][0]);
  for (double v : d.values.effective()) CHECK(v == 0.0);
}

TEST_CASE("dyadic sharp of a child indicator") {
  auto s = setup(256);
  const Id root = s.F.generations[0][0];
  const Id child = s.F.cube(root).children.front();
  const double theta = s.F.cube(child).mass / s.F.cube(root).mass;
  SampledFunction f = SampledFunction::constant(256, 0.0);
  for (Id m : s.F.cube(child).members) f.values[static_cast<std::size_t>(m)] = 1.0;
  const auto d = dyadic_sharp(s.I.space, s.F, f, root);
  for (Id x : s.F.cube(root).members) CHECK(d.values(x) >= 2 * theta * (1 - theta) * (1 - 1e-12));
}

TEST_CASE("single-cube forest") {
  const auto T = instantiate_builtin("tiny4");
  const auto F = build_forest(T.space, T.structure, 1, 0.3, 1);
  const Id root = F.generations[0][0];
  const SampledFunction f{{0.0, 2.0, -1.0, 5.0}, std::nullopt};
  const auto d = dyadic_sharp(T.space, F, f, root);
  const double m = (2.0 * 0.2 - 1.0 * 0.3) / 0.5;
  const double expect = (0.2 * std::fabs(2.0 - m) + 0.3 * std::fabs(-1.0 - m)) / 0.5;
  for (Id x : F.cube(root).members) CHECK(d.values(x) == doctest::Approx(expect));
}

TEST_CASE("dyadic sharp is at most twice the dyadic maximal function") {
  auto s = setup(256);
  const Id root = s.F.generations[0][0];
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto f = fx::random_function(256, seed).restricted_to(s.F.cube(root).members);
    const auto d = dyadic_sharp(s.I.space, s.F, f, root);
    for (Id x : s.F.cube(root).members) {
      double star = 0.0;
      for (int k = s.F.cube(root).gen; k <= s.F.depth; ++k) {
        star = std::max(star, avg_abs(s.I.space, s.F.cube(s.F.cube_containing(x, k)).members, f));
      }
      CHECK(d.values(x) <= 2 * star * (1 + 1e-12));
    }
  }
}

TEST_CASE("ball sharp") {
  const auto I = fx::grid("grid1d", 256);
  const auto zero = ball_sharp(I.space, I.structure, SampledFunction::constant(256, 7.0), 1);
  for (double v : zero.effective()) CHECK(v == 0.0);
  const auto f = function_library("indicator_halfspace", {}, I.space);
  SampledFunction f2;
  for (double v : f.values) f2.values.push_back(2 * v);
  const auto a = ball_sharp(I.space, I.structure, f, 1);
  const auto b = ball_sharp(I.space, I.structure, f2, 1);
  double top = 0.0;
  for (std::size_t i = 0; i < 256; ++i) {
    CHECK(b.values[i] == 2 * a.values[i]);
    top = std::max(top, a.values[i]);
  }
  CHECK(top <= 0.5);
  CHECK(top > 0.49);
}

TEST_CASE("sharp comparison on small roots") {
  auto s = setup(256);
  for (const auto& name : function_names()) {
    CAPTURE(name);
    const auto rep = sharp_comparison_check(s.I.space, s.I.structure, s.F, function_library(name, {}, s.I.space), s.root);
    CHECK(rep.pass);
  }
}

TEST_CASE("CZ decomposition equals the brute-force stopping time") {
  auto s = setup(256);
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto f = fx::random_function(256, 50 + seed, -3.0, 3.0);
    for (Id root : {s.root, s.F.generations[0][0]}) {
      const double a = avg_abs(s.I.space, s.F.cube(root).members, f);
      for (double l : {a, 1.2 * a, 2 * a, 4 * a}) {
        const auto fam = cz_decompose(s.I.space, s.F, f, root, l);
        CHECK(fam.cubes == brute_cz(s.I.space, s.F, f, root, l));
      }
      CHECK_THROWS_AS(cz_decompose(s.I.space, s.F, f, root, 0.5 * a), PreconditionError);
    }
  }
}

TEST_CASE("CZ trivial families") {
  auto s = setup(256);
  CHECK(cz_decompose(s.I.space, s.F, SampledFunction::constant(256, 1.0), s.root, 1.0).cubes.empty());
  const auto f = fx::random_function(256, 5);
  double top = 0.0;
  for (Id q : cubes_below(s.F, s.root)) top = std::max(top, avg_abs(s.I.space, s.F.cube(q).members, f));
  CHECK(cz_decompose(s.I.space, s.F, f, s.root, top + 1).cubes.empty());
}

TEST_CASE("CZ properties on the fixtures") {
  auto s = setup(256);
  for (const auto& name : function_names()) {
    CAPTURE(name);
    const auto f = function_library(name, {}, s.I.space);
    const double a = std::max(avg_abs(s.I.space, s.F.cube(s.root).members, f), 1e-3);
    const std::vector<double> ls{a, 2 * a, 4 * a};
    const auto rep = cz_family_properties(s.I.space, s.I.structure, s.F, f, s.root, ls);
    for (const char* p : {"i", "ii", "iii", "iv", "v"}) CHECK(rep.data["properties"][p].get<bool>());
    CHECK(rep.data["claim"]["pass"].get<bool>());
    const auto again = cz_family_properties(s.I.space, s.I.structure, s.F, f, s.root, ls);
    CHECK(again.to_json().dump() == rep.to_json().dump());
  }
  const std::vector<double> unsorted{2.0, 1.0};
  CHECK_THROWS_AS(cz_family_properties(s.I.space, s.I.structure, s.F, fx::random_function(256, 1), s.root, unsorted),
                  ArgumentError);
}

TEST_CASE("Fefferman-Stein closed forms") {
  auto s = setup(256);
  for (double p : {1.0, 2.0}) {
    const auto c = fs_verify(s.I.space, s.I.structure, s.F, SampledFunction::constant(256, 3.0), s.root, p, "dyadic");
    CHECK(c.rhs_sharp_term == 0.0);
    CHECK(c.rhs_avg_term == doctest::Approx(3.0));
    CHECK(c.ratio <= 1.0 + 1e-12);
    const auto z = fs_verify(s.I.space, s.I.structure, s.F, SampledFunction::constant(256, 0.0), s.root, p, "ball");
    CHECK(z.ratio == 1.0);
  }
  const auto f = function_library("indicator_halfspace", {}, s.I.space);
  const auto a = fs_verify(s.I.space, s.I.structure, s.F, f, s.root, 2.0, "ball");
  const auto b = fs_verify(s.I.space, s.I.structure, s.F, f, s.root, 2.0, "ball");
  CHECK(std::isfinite(a.ratio));
  CHECK(a.report.to_json().dump() == b.report.to_json().dump());
  CHECK_THROWS_AS(fs_verify(s.I.space, s.I.structure, s.F, f, s.root, 0.5, "ball"), ArgumentError);
  CHECK_THROWS_AS(fs_verify(s.I.space, s.I.structure, s.F, f, s.root, 2.0, "cube"), ArgumentError);
}

TEST_CASE("corollary and cover checks") {
  auto s = setup(256);
  const auto c = corollary_ball_check(s.I.space, s.I.structure, s.F, SampledFunction::constant(256, 2.0), s.root, 2.0);
  CHECK(c.pass);
  const auto F2 = build_forest(s.I.space, s.I.structure, 2, 0.25, 6);
  int k = 1;
  for (; k <= 6; ++k) {
    try {
      finite_ball_cover(s.I.space, s.I.structure, F2, 1, k);
      break;
    } catch (const ScaleError&) {
    }
  }
  REQUIRE(k <= 6);
  const auto rep = cover_lp_check(s.I.space, s.I.structure, F2, {"zero", "left_half", "centered_linear"}, 1, k, 2.0);
  CHECK(rep.pass);
  for (const auto& row : rep.tables[0].rows) {
    if (row[1] == 0.0) CHECK(row[5] == 1.0);
  }
}

TEST_CASE("root selection") {
  auto s = setup(256);
  const int k0 = small_root_generation(s.I.space, s.I.structure, s.F);
  const double r = vitali_radius_cap(s.I.structure, 2).r;
  for (int k = k0; k <= s.F.depth; ++k) {
    for (Id q : s.F.generations[static_cast<std::size_t>(k - 1)]) {
      for (Id m : s.F.cube(q).members) CHECK(s.I.space.dist(s.F.cube(q).center, m) < r);
    }
  }
  CHECK(s.F.cube(s.root).gen == k0);
  CHECK_THROWS_AS(default_root(s.F, 0), ArgumentError);
}
