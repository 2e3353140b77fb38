#include <doctest.h>

#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "lhs/error.hpp"
#include "lhs/functions.hpp"
#include "lhs/maximal.hpp"

using namespace lhs;

namespace {

constexpr double kUlp = std::numeric_limits<double>::epsilon();

// Brute force: every center of Ω_n, every distinct distance below the cap,
// closed ball, plain id-order sums.
std::vector<double> brute_maximal(const Instance& I, const SampledFunction& f, int n, double cap) {
  const auto& S = I.space;
  const auto N = static_cast<Id>(S.size());
  std::vector<double> best(S.size(), 0.0);
  for (Id c : I.structure.level(n).ids) {
    std::vector<double> ds;
    for (Id y = 0; y < N; ++y) {
      if (S.dist(c, y) < cap) ds.push_back(S.dist(c, y));
    }
    std::sort(ds.begin(), ds.end());
    ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
    for (double d : ds) {
      double w = 0.0, s = 0.0;
      for (Id y = 0; y < N; ++y) {
        if (S.dist(c, y) <= d) {
          w += S.weight(y);
          s += S.weight(y) * std::fabs(f(y));
        }
      }
      for (Id y = 0; y < N; ++y) {
        if (S.dist(c, y) <= d && I.structure.level(n).contains(y)) best[static_cast<std::size_t>(y)] = std::max(best[static_cast<std::size_t>(y)], s / w);
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("constant function") {
  const auto I = fx::grid("grid1d", 128);
  const auto M = local_maximal(I.space, I.structure, SampledFunction::constant(128, -2.5), 1);
  for (Id x : I.structure.level(1).ids) CHECK(M.values(x) == doctest::Approx(2.5).epsilon(1e-15));
  for (Id x = 0; x < 128; ++x) {
    if (!I.structure.level(1).contains(x)) CHECK(M.values(x) == 0.0);
  }
}

TEST_CASE("tiny4 atom at 0.5") {
  const auto I = instantiate_builtin("tiny4");
  const SampledFunction f{{0.0, 0.0, 1.0, 0.0}, std::nullopt};
  const auto M = local_maximal(I.space, I.structure, f, 1);
  CHECK(M.values(2) == 1.0);
  const auto R = local_maximal_reference(I.space, I.structure, f, 1);
  CHECK(M.values.values == R.values.values);
}

TEST_CASE("kernel equals brute force and the serial reference") {
  for (const auto& [name, N] : std::vector<std::pair<std::string, std::size_t>>{
           {"grid1d", 128}, {"weighted_grid", 100}, {"grid2d", 100}, {"power_rho_grid", 96}}) {
    CAPTURE(name);
    const auto I = fx::grid(name, N);
    const auto f = fx::random_function(N, 21);
    const auto M = local_maximal(I.space, I.structure, f, 1);
    const auto R = local_maximal_reference(I.space, I.structure, f, 1);
    CHECK(M.values.values == R.values.values);
    const auto B = brute_maximal(I, f, 1, M.cap_r);
    for (std::size_t i = 0; i < N; ++i) CHECK(M.values.values[i] == doctest::Approx(B[i]).epsilon(1e-13));
  }
}

TEST_CASE("radius grid mode") {
  const auto I = fx::grid("grid1d", 128);
  const auto f = fx::random_function(128, 4);
  const auto cap = local_maximal(I.space, I.structure, f, 1).cap_r;
  const std::vector<double> grid{cap / 8, cap / 2, cap};
  const auto M = local_maximal(I.space, I.structure, f, 1, grid);
  const auto R = local_maximal_reference(I.space, I.structure, f, 1, grid);
  CHECK(M.values.values == R.values.values);
  const std::vector<double> bad{2 * cap};
  CHECK_THROWS_AS(local_maximal(I.space, I.structure, f, 1, bad), PreconditionError);
}

TEST_CASE("sublinearity and homogeneity") {
  const auto I = fx::grid("grid1d", 128);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto f = fx::random_function(128, 100 + s);
    const auto g = fx::random_function(128, 200 + s);
    SampledFunction h;
    for (std::size_t i = 0; i < 128; ++i) h.values.push_back(f.values[i] + g.values[i]);
    const auto Mf = local_maximal(I.space, I.structure, f, 1).values;
    const auto Mg = local_maximal(I.space, I.structure, g, 1).values;
    const auto Mh = local_maximal(I.space, I.structure, h, 1).values;
    SampledFunction f3;
    for (double v : f.values) f3.values.push_back(-3.0 * v);
    const auto M3 = local_maximal(I.space, I.structure, f3, 1).values;
    for (Id x : I.structure.level(1).ids) {
      CHECK(Mh(x) <= (Mf(x) + Mg(x)) * (1 + 8 * kUlp));
      CHECK(std::fabs(M3(x) - 3.0 * Mf(x)) <= 8 * kUlp * 3.0 * Mf(x));
    }
  }
}

TEST_CASE("weak type on the spike") {
  const auto I = fx::grid("grid1d", 256);
  const auto f = function_library("atom_spike", {}, I.space);
  std::vector<double> ts;
  for (int j = 0; j <= 16; ++j) ts.push_back(std::pow(10.0, -4.0 + j / 4.0));
  const auto rep = weak_type_check(I.space, I.structure, f, 1, ts);
  CHECK(rep.pass);
  CHECK(std::isfinite(rep.data["c_hat_max"].get<double>()));
  // t above max Mf contributes nothing.
  CHECK(rep.tables[0].rows.back()[1] == 0.0);
  const auto zero = weak_type_check(I.space, I.structure, SampledFunction::constant(256, 0.0), 1, ts);
  CHECK(zero.data["c_hat_max"].get<double>() == 0.0);
}

TEST_CASE("strong type") {
  const auto I = fx::grid("grid1d", 256);
  const auto one = strong_type_check(I.space, I.structure, SampledFunction::constant(256, 1.0), 1, 2.0);
  const double expect = std::sqrt(measure(I.space, I.structure.level(1).ids) / measure(I.space, I.structure.level(2).ids));
  CHECK(one.data["ratio"].get<double>() == doctest::Approx(expect));
  const auto ind = strong_type_check(I.space, I.structure, function_library("indicator_halfspace", {}, I.space), 1, 2.0);
  CHECK(ind.pass);
  const auto sup = strong_type_check(I.space, I.structure, fx::random_function(256, 9), 1, INFINITY);
  CHECK(sup.data["ratio"].get<double>() <= 1.0);
  CHECK_THROWS_AS(strong_type_check(I.space, I.structure, SampledFunction::constant(256, 1.0), 1, 1.0), ArgumentError);
}

TEST_CASE("differentiation: |f| <= Mf") {
  const auto T = instantiate_builtin("tiny4");
  CHECK(differentiation_check(T.space, T.structure, fx::random_function(4, 2), 1).pass);
  const auto I = fx::grid("grid1d", 256);
  const auto f = function_library("indicator_halfspace", {}, I.space);
  CHECK(differentiation_check(I.space, I.structure, f, 1).pass);
  const auto M = local_maximal(I.space, I.structure, f, 1).values;
  for (Id x : I.structure.level(1).ids) {
    const double c = I.space.cloud().coords(x)[0];
    if (c < 0.45) CHECK(M(x) == 1.0);
  }
}

TEST_CASE("lp norms") {
  const auto T = instantiate_builtin("tiny4");
  const SampledFunction f{{1.0, -2.0, 0.0, 3.0}, std::nullopt};
  CHECK(lp_norm(T.space, f, {0, 1, 2, 3}, 1.0) == doctest::Approx(0.1 + 0.4 + 1.2));
  CHECK(lp_norm(T.space, f, {0, 1, 2, 3}, INFINITY) == 3.0);
}
