#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "lhs/dyadic.hpp"
#include "lhs/error.hpp"

using namespace lhs;

namespace {

IdSet members_below(const DyadicForest& F, Id q, int k) {
  IdSet out;
  for (Id c : subcubes(F, q, k)) {
    const auto& m = F.cube(c).members;
    out.insert(out.end(), m.begin(), m.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("E1 forest, delta 1/4") {
  const auto I = fx::grid("grid1d", 256);
  const auto F = build_forest(I.space, I.structure, 1, 0.25, 3);
  const auto& g1 = F.generations[0];
  CHECK(g1.size() >= 2);
  CHECK(g1.size() <= 5);
  const auto rep = verify_forest(I.space, I.structure, F, 100000);
  for (const char* p : {"c", "e", "f"}) CHECK(rep.data["properties"][p].get<bool>());
  CHECK(rep.data["net_separated"].get<bool>());
  CHECK(rep.data["net_covering"].get<bool>());
  CHECK(rep.data["a0_hat"].get<double>() > 0.0);

  // Every member set fits in B(z, c1 delta^k).
  const double c1 = rep.data["c1_hat"].get<double>();
  for (const auto& q : F.cubes) {
    for (Id m : q.members) CHECK(I.space.dist(q.center, m) < c1 * F.scale(q.gen));
  }
}

TEST_CASE("generation k cubes partition the level") {
  const auto I = fx::grid("grid1d", 256);
  const auto F = build_forest(I.space, I.structure, 1, 0.25, 4);
  for (int k = 1; k <= 4; ++k) {
    IdSet all;
    for (Id q : F.generations[static_cast<std::size_t>(k - 1)]) {
      const auto& m = F.cube(q).members;
      all.insert(all.end(), m.begin(), m.end());
    }
    std::sort(all.begin(), all.end());
    CHECK(all == I.structure.level(1).ids);
  }
}

TEST_CASE("ancestors and subcubes") {
  const auto I = fx::grid("grid1d", 256);
  const auto F = build_forest(I.space, I.structure, 1, 0.25, 4);
  for (const auto& q : F.cubes) {
    CHECK(ancestor(F, q.id, q.gen) == q.id);
    // Ascending chain: each ancestor contains the previous one.
    Id prev = q.id;
    for (int k = q.gen - 1; k >= 1; --k) {
      const Id a = ancestor(F, q.id, k);
      CHECK(F.cube(a).gen == k);
      CHECK(std::includes(F.cube(a).members.begin(), F.cube(a).members.end(), F.cube(prev).members.begin(),
                          F.cube(prev).members.end()));
      prev = a;
    }
  }
  for (Id root : F.generations[0]) CHECK(members_below(F, root, 4) == F.cube(root).members);
}

TEST_CASE("single generation is the nearest-center partition") {
  const auto I = fx::grid("grid1d", 128);
  const auto F = build_forest(I.space, I.structure, 1, 0.25, 1);
  for (Id x : I.structure.level(1).ids) {
    const Id q = F.cube_containing(x, 1);
    const double d = I.space.dist(x, F.cube(q).center);
    for (Id r : F.generations[0]) CHECK(d <= I.space.dist(x, F.cube(r).center));
  }
}

TEST_CASE("tiny4 greedy net") {
  const auto I = instantiate_builtin("tiny4");
  const auto F = build_forest(I.space, I.structure, 1, 0.3, 2);
  REQUIRE(F.generations[0].size() == 1);
  const auto& q = F.cube(F.generations[0][0]);
  CHECK(q.center == 1);
  CHECK(q.members == IdSet{1, 2});
}

TEST_CASE("forest argument errors") {
  const auto I = fx::grid("grid1d", 64);
  CHECK_THROWS_AS(build_forest(I.space, I.structure, 1, 1.0, 2), ArgumentError);
  CHECK_THROWS_AS(build_forest(I.space, I.structure, 1, 0.0, 2), ArgumentError);
  CHECK_THROWS_AS(build_forest(I.space, I.structure, 1, 0.25, 0), ArgumentError);
  const auto F = build_forest(I.space, I.structure, 1, 0.25, 2);
  CHECK_THROWS_AS(verify_forest(I.space, fx::grid("grid1d", 128).structure, F, 10), ArgumentError);
}

TEST_CASE("atomic depth reaches singleton cubes") {
  const auto I = fx::grid("grid1d", 256);
  const int K = atomic_depth(I.space, I.structure, 1, 0.25);
  const auto F = build_forest(I.space, I.structure, 1, 0.25, K);
  for (Id q : F.generations.back()) CHECK(F.cube(q).members.size() == 1);
  CHECK(verify_forest(I.space, I.structure, F, 1000).data["finest_generation_atomic"].get<bool>());
}

TEST_CASE("sampled triples equal a brute-force recount") {
  const auto I = fx::grid("grid1d", 64);
  const auto F = build_forest(I.space, I.structure, 1, 0.25, 3);
  const auto rep = verify_forest(I.space, I.structure, F, 200, 3);
  REQUIRE_FALSE(rep.data["exhaustive"].get<bool>());
  REQUIRE(!rep.tables.empty());
  const auto& t = rep.tables[0];
  for (const auto& row : t.rows) {
    const Id q = static_cast<Id>(row[0]), x = static_cast<Id>(row[1]);
    const double r = row[2];
    double in_r = 0.0, in_2r = 0.0;
    for (Id y = 0; y < 64; ++y) {
      const bool member = F.cube_of[static_cast<std::size_t>(F.cube(q).gen - 1)][static_cast<std::size_t>(y)] == q;
      if (!member) continue;
      const double d = std::fabs(I.space.cloud().coords(x)[0] - I.space.cloud().coords(y)[0]);
      if (d < r) in_r += I.space.weight(y);
      if (d < 2 * r) in_2r += I.space.weight(y);
    }
    CHECK(row[3] == in_2r / in_r);
  }
  const auto full = verify_forest(I.space, I.structure, F, 100000000);
  CHECK(full.data["exhaustive"].get<bool>());
  CHECK(rep.data["c2_hat"].get<double>() <= full.data["c2_hat"].get<double>());
}
