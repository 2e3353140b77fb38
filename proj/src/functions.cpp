#include "lhs/functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lhs/error.hpp"

namespace lhs {

namespace {

std::vector<double> bbox_center(const PointCloud& cloud) {
  const int d = cloud.dim();
  std::vector<double> lo(static_cast<std::size_t>(d), std::numeric_limits<double>::infinity());
  std::vector<double> hi(static_cast<std::size_t>(d), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto x = cloud.coords(static_cast<Id>(i));
    for (int k = 0; k < d; ++k) {
      lo[static_cast<std::size_t>(k)] = std::min(lo[static_cast<std::size_t>(k)], x[static_cast<std::size_t>(k)]);
      hi[static_cast<std::size_t>(k)] = std::max(hi[static_cast<std::size_t>(k)], x[static_cast<std::size_t>(k)]);
    }
  }
  for (int k = 0; k < d; ++k) lo[static_cast<std::size_t>(k)] = 0.5 * (lo[static_cast<std::size_t>(k)] + hi[static_cast<std::size_t>(k)]);
  return lo;
}

double coord(const Space& space, Id i, int axis) {
  return space.cloud().coords(i)[static_cast<std::size_t>(axis)];
}

}  // namespace

const std::vector<std::string>& function_names() {
  static const std::vector<std::string> names{"constant",   "indicator_halfspace", "log_singularity",
                                              "two_valued", "atom_spike",          "random_piecewise"};
  return names;
}

SampledFunction function_library(const std::string& name, const FunctionParams& params,
                                 const Space& space) {
  const std::size_t N = space.size();
  if (params.axis < 0 || params.axis >= space.cloud().dim()) throw ArgumentError("axis out of range");
  const std::vector<double> anchor = params.anchor ? *params.anchor : bbox_center(space.cloud());
  if (static_cast<int>(anchor.size()) != space.cloud().dim()) {
    throw ArgumentError("anchor dimension does not match the cloud");
  }
  SampledFunction f;
  f.values.assign(N, 0.0);
  if (name == "constant") {
    std::fill(f.values.begin(), f.values.end(), params.c);
  } else if (name == "indicator_halfspace") {
    for (std::size_t i = 0; i < N; ++i) f.values[i] = coord(space, static_cast<Id>(i), params.axis) < params.threshold ? 1.0 : 0.0;
  } else if (name == "two_valued") {
    for (std::size_t i = 0; i < N; ++i) f.values[i] = coord(space, static_cast<Id>(i), params.axis) < params.threshold ? 1.0 : -1.0;
  } else if (name == "log_singularity") {
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = i + 1; j < N; ++j) dmin = std::min(dmin, space.dist(static_cast<Id>(i), static_cast<Id>(j)));
    }
    if (!std::isfinite(dmin)) dmin = 1.0;
    const double floor = std::log(dmin);
    for (std::size_t i = 0; i < N; ++i) {
      const double r = space.rho()(space.cloud().coords(static_cast<Id>(i)), anchor);
      f.values[i] = r > 0.0 ? std::max(floor, std::log(r)) : floor;
    }
  } else if (name == "atom_spike") {
    Id best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < N; ++i) {
      const double r = space.rho()(space.cloud().coords(static_cast<Id>(i)), anchor);
      if (r < bd) {
        bd = r;
        best = static_cast<Id>(i);
      }
    }
    if (N > 0) f.values[static_cast<std::size_t>(best)] = 1.0;
  } else if (name == "random_piecewise") {
    if (params.pieces < 1) throw ArgumentError("pieces must be positive");
    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> level(static_cast<std::size_t>(params.pieces));
    for (auto& v : level) v = U(rng);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < N; ++i) {
      lo = std::min(lo, coord(space, static_cast<Id>(i), params.axis));
      hi = std::max(hi, coord(space, static_cast<Id>(i), params.axis));
    }
    const double span = hi > lo ? hi - lo : 1.0;
    for (std::size_t i = 0; i < N; ++i) {
      auto k = static_cast<int>((coord(space, static_cast<Id>(i), params.axis) - lo) / span * params.pieces);
      k = std::clamp(k, 0, params.pieces - 1);
      f.values[i] = level[static_cast<std::size_t>(k)];
    }
  } else {
    throw ArgumentError("unknown function: " + name);
  }
  return f;
}

}  // namespace lhs
