#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "lhs/space.hpp"

namespace fx {

inline lhs::Instance grid(const std::string& name, std::size_t N) {
  lhs::BuiltinParams p;
  p.N = N;
  return lhs::instantiate_builtin(name, p);
}

inline lhs::SampledFunction random_function(std::size_t n, std::uint64_t seed, double lo = -1.0,
                                            double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(lo, hi);
  lhs::SampledFunction f;
  f.values.resize(n);
  for (auto& v : f.values) v = U(rng);
  return f;
}

// 64-point grid on (0, 1) with point 32 pulled toward point 31, so the ball
// around 31 of radius 0.012 holds exactly {31, 32}.
inline lhs::Instance even_split_cloud() {
  const std::size_t N = 64;
  std::vector<double> x(N), w(N, 1.0 / N);
  for (std::size_t i = 0; i < N; ++i) x[i] = (i + 0.5) / N;
  x[32] -= 0.3 / N;
  std::vector<lhs::Level> lv;
  const double lo[] = {0.25, 0.125, 0.0625, 0.0};
  const double eps[] = {1.0 / 16, 1.0 / 32, 1.0 / 32, 1.0 / 32};
  for (int k = 0; k < 4; ++k) {
    lhs::IdSet ids;
    for (std::size_t i = 0; i < N; ++i) {
      if (x[i] > lo[k] && x[i] < 1.0 - lo[k]) ids.push_back(static_cast<lhs::Id>(i));
    }
    lv.push_back(lhs::make_level(N, ids, eps[k], 1.0, 4.0));
  }
  lhs::Instance I;
  I.name = "even_split";
  I.space = lhs::Space(lhs::PointCloud(1, x, w), lhs::Quasidistance{1.0});
  I.structure = lhs::LocalStructure(std::move(lv));
  return I;
}

}  // namespace fx
