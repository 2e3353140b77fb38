#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "lhs/bmo_jn.hpp"
#include "lhs/error.hpp"
#include "lhs/functions.hpp"

using namespace lhs;

TEST_CASE("JN radius cap") {
  const auto I = fx::even_split_cloud();
  const auto r = jn_radius_cap(I.structure, 1);
  CHECK(r.K == doctest::Approx(5.0));
  CHECK(r.alpha == doctest::Approx(8.5));
  CHECK(r.R == doctest::Approx(2 * 0.0625 / 8.5));
  CHECK(r.alpha * r.R == doctest::Approx(2 * 0.0625));
}

TEST_CASE("Gamma-form constant") {
  CHECK(gamma_form_constant(2.0, 1.0) == doctest::Approx(2.0));
  CHECK(gamma_form_constant(1.0, 2.0) == doctest::Approx(1.0));
  CHECK(std::isinf(gamma_form_constant(2.0, 0.0)));
}

TEST_CASE("constant function") {
  const auto I = fx::grid("grid1d", 256);
  const auto f = SampledFunction::constant(256, 2.5);
  CHECK(bmo_seminorm(I.space, I.structure, f, 1).value == 0.0);
  CHECK(bmo_p_seminorm(I.space, I.structure, f, 1, 2.0).value == 0.0);
  const auto S = default_jn_ball(I.space, I.structure, 1);
  const auto T = jn_construct(I.space, I.structure, f, 1, S, 3);
  CHECK(T.nodes.size() == 1);
  CHECK(T.report.pass);
  const auto D = jn_verify(I.space, I.structure, f, 1, S);
  CHECK(std::isinf(D.b_hat));
}

TEST_CASE("two-valued function splitting a ball evenly") {
  const auto I = fx::even_split_cloud();
  SampledFunction f;
  for (std::size_t i = 0; i < 64; ++i) f.values.push_back(i <= 31 ? -1.0 : 1.0);
  const auto b1 = bmo_seminorm(I.space, I.structure, f, 1);
  const auto b2 = bmo_p_seminorm(I.space, I.structure, f, 1, 2.0);
  CHECK(b1.value == 1.0);
  CHECK(b2.value == 1.0);
  const BallRef S{31, 0.012};
  const auto D = jn_verify(I.space, I.structure, f, 1, S);
  CHECK(D.b_exact == doctest::Approx(std::log(2.0)));
  const auto rep = bmo_equiv_check(I.space, I.structure, f, 1, 2.0);
  CHECK(rep.data["ratio"].get<double>() == 1.0);
}

TEST_CASE("seminorm inequalities") {
  const auto I = fx::grid("grid1d", 512);
  for (const auto& name : function_names()) {
    CAPTURE(name);
    const auto f = function_library(name, {}, I.space);
    double sup = 0.0;
    for (double v : f.values) sup = std::max(sup, std::fabs(v));
    const double b = bmo_seminorm(I.space, I.structure, f, 1).value;
    CHECK(b <= 2 * sup * (1 + 1e-12));
    const double p2 = bmo_p_seminorm(I.space, I.structure, f, 1, 2.0).value;
    const double p4 = bmo_p_seminorm(I.space, I.structure, f, 1, 4.0).value;
    CHECK(p2 <= p4 * (1 + 1e-12));
    CHECK(p4 <= 2 * sup * (1 + 1e-12));
  }
  CHECK_THROWS_AS(bmo_p_seminorm(I.space, I.structure, SampledFunction::constant(512, 1.0), 1, 1.0),
                  ArgumentError);
}

TEST_CASE("nontrivial JN tree") {
  const auto I = fx::grid("grid1d", 1024);
  const auto f = function_library("atom_spike", {}, I.space);
  const auto S = default_jn_ball(I.space, I.structure, 1);
  const auto T = jn_construct(I.space, I.structure, f, 1, S, 3, bmo_seminorm(I.space, I.structure, f, 1).value);
  CHECK(T.nodes.size() > 1);
  CHECK(T.nested);
  CHECK(T.report.pass);
  for (std::size_t k = 0; k < T.tail_mass.size(); ++k) CHECK(T.tail_mass[k] <= T.tail_bound[k]);
}

TEST_CASE("JN construction errors") {
  const auto I = fx::grid("grid1d", 1024);
  const auto f = function_library("log_singularity", {}, I.space);
  auto S = default_jn_ball(I.space, I.structure, 1);
  const double R = jn_radius_cap(I.structure, 1).R;
  CHECK_THROWS_AS(jn_construct(I.space, I.structure, f, 1, {S.center, 2 * R}, 3), PreconditionError);
  CHECK_THROWS_AS(jn_construct(I.space, I.structure, f, 1, S, 0), ArgumentError);
  CHECK_THROWS_AS(jn_construct(I.space, I.structure, f, 1, S, 3, 1e-9), ConstructionError);
}

TEST_CASE("JN distribution on the log fixture") {
  const auto I = fx::grid("grid1d", 1024);
  const auto f = function_library("log_singularity", {}, I.space);
  const auto S = default_jn_ball(I.space, I.structure, 1);
  const auto D = jn_verify(I.space, I.structure, f, 1, S);
  CHECK(D.b_hat > 0.0);
  CHECK(D.b_exact <= D.b_hat_refined);
  CHECK(D.b_hat_refined <= D.b_hat);
  CHECK(std::fabs(D.b_hat_refined - D.b_hat) <= 0.05 * D.b_hat);
  const auto& t = D.report.tables.at(0);
  CHECK(t.columns == std::vector<std::string>{"lambda", "D", "bound"});
}
