#include "lhs/reference.hpp"

#include <algorithm>
#include <cmath>

namespace lhs::reference {

namespace {

std::vector<double> radii_for(const Space& space, Id center, double cap,
                              std::span<const double> grid) {
  std::vector<double> out;
  if (!grid.empty()) {
    out.assign(grid.begin(), grid.end());
    return out;
  }
  for (std::size_t y = 0; y < space.size(); ++y) {
    const double d = space.dist(center, static_cast<Id>(y));
    if (d < cap) out.push_back(d);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Neighbor> open_ball(const Space& space, Id center, double r) {
  std::vector<Neighbor> out;
  for (std::size_t y = 0; y < space.size(); ++y) {
    const double d = space.dist(center, static_cast<Id>(y));
    if (d < r) out.push_back({d, static_cast<Id>(y)});
  }
  std::sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.d < b.d || (a.d == b.d && a.id < b.id);
  });
  return out;
}

template <class Stat>
std::vector<double> sweep(const Space& space, std::span<const Id> centers, double cap,
                          std::span<const double> grid, const Mask& eval_mask, Stat stat) {
  std::vector<double> best(space.size(), 0.0);
  for (Id c : centers) {
    for (double r : radii_for(space, c, cap, grid)) {
      const auto members = grid.empty() ? closed_ball(space, c, r) : open_ball(space, c, r);
      if (members.empty()) continue;
      const double v = stat(members);
      for (const auto& m : members) {
        if (eval_mask[static_cast<std::size_t>(m.id)]) {
          best[static_cast<std::size_t>(m.id)] = std::max(best[static_cast<std::size_t>(m.id)], v);
        }
      }
    }
  }
  return best;
}

}  // namespace

std::vector<Neighbor> closed_ball(const Space& space, Id center, double d) {
  std::vector<Neighbor> out;
  for (std::size_t y = 0; y < space.size(); ++y) {
    const double e = space.dist(center, static_cast<Id>(y));
    if (e <= d) out.push_back({e, static_cast<Id>(y)});
  }
  std::sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.d < b.d || (a.d == b.d && a.id < b.id);
  });
  return out;
}

std::vector<double> max_average(const Space& space, std::span<const Id> centers, double cap,
                                std::span<const double> radius_grid,
                                std::span<const double> values, const Mask& eval_mask) {
  return sweep(space, centers, cap, radius_grid, eval_mask, [&](const std::vector<Neighbor>& b) {
    double sw = 0.0, swf = 0.0;
    for (const auto& m : b) {
      const double w = space.weight(m.id);
      sw += w;
      swf += w * values[static_cast<std::size_t>(m.id)];
    }
    return swf / sw;
  });
}

std::vector<double> max_oscillation(const Space& space, std::span<const Id> centers, double cap,
                                    std::span<const double> values, const Mask& eval_mask,
                                    double p) {
  return sweep(space, centers, cap, {}, eval_mask, [&](const std::vector<Neighbor>& b) {
    double sw = 0.0, swf = 0.0;
    for (const auto& m : b) {
      const double w = space.weight(m.id);
      sw += w;
      swf += w * values[static_cast<std::size_t>(m.id)];
    }
    const double mean = swf / sw;
    double acc = 0.0;
    for (const auto& m : b) {
      acc += space.weight(m.id) * std::pow(std::fabs(values[static_cast<std::size_t>(m.id)] - mean), p);
    }
    return std::pow(acc / sw, 1.0 / p);
  });
}

}  // namespace lhs::reference
