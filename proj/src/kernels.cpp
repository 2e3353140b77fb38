#include "lhs/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lhs/error.hpp"

namespace lhs::kernels {

namespace {

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

int thread_id() {
#ifdef _OPENMP
  return omp_get_thread_num();
#else
  return 0;
#endif
}

class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : t_(n + 1, 0.0) {}
  void add(std::size_t i, double v) {
    for (++i; i < t_.size(); i += i & (~i + 1)) t_[i] += v;
  }
  /// Sum of the first k entries.
  double prefix(std::size_t k) const {
    double s = 0.0;
    for (; k > 0; k -= k & (~k + 1)) s += t_[k];
    return s;
  }

 private:
  std::vector<double> t_;
};

// Scatter per-ball values to ball members via a suffix max over ends.
void scatter(const PrefixBalls& pb, const std::vector<double>& vals, const Mask& eval_mask,
             std::vector<double>& best) {
  if (pb.ends.empty()) return;
  std::vector<double> suffix(vals.size());
  double run = vals.back();
  for (std::size_t k = vals.size(); k-- > 0;) {
    run = std::max(run, vals[k]);
    suffix[k] = run;
  }
  std::size_t k = 0;
  for (std::uint32_t j = 0; j < pb.ends.back(); ++j) {
    while (pb.ends[k] <= j) ++k;
    const Id id = pb.nb[j].id;
    if (eval_mask[static_cast<std::size_t>(id)]) {
      double& b = best[static_cast<std::size_t>(id)];
      b = std::max(b, suffix[k]);
    }
  }
}

template <class PerBall>
PointwiseSup pointwise_sweep(const Space& space, std::span<const Id> centers, const BallScan& scan,
                             const Mask& eval_mask, PerBall per_ball) {
  const std::size_t n = space.size();
  const int T = thread_count();
  std::vector<std::vector<double>> local(static_cast<std::size_t>(T), std::vector<double>(n, 0.0));
  std::int64_t candidates = 0;
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : candidates)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(centers.size()); ++c) {
    const PrefixBalls pb = prefix_balls(space, centers[static_cast<std::size_t>(c)], scan);
    const std::vector<double> vals = per_ball(pb);
    candidates += static_cast<std::int64_t>(vals.size());
    scatter(pb, vals, eval_mask, local[static_cast<std::size_t>(thread_id())]);
  }
  PointwiseSup out;
  out.value.assign(n, 0.0);
  for (const auto& l : local) {
    for (std::size_t i = 0; i < n; ++i) out.value[i] = std::max(out.value[i], l[i]);
  }
  out.candidates = candidates;
  return out;
}

}  // namespace

PrefixBalls prefix_balls(const Space& space, Id center, const BallScan& scan) {
  PrefixBalls pb;
  pb.nb = sorted_neighbors(space, center, scan.cap);
  std::uint32_t limit = static_cast<std::uint32_t>(pb.nb.size());
  if (scan.within) {
    for (std::uint32_t j = 0; j < pb.nb.size(); ++j) {
      if (!(*scan.within)[static_cast<std::size_t>(pb.nb[j].id)]) {
        limit = j;
        break;
      }
    }
  }
  if (scan.radius_grid.empty()) {
    for (std::uint32_t j = 0; j < limit; ++j) {
      const bool group_end = j + 1 == pb.nb.size() || pb.nb[j + 1].d != pb.nb[j].d;
      if (group_end) pb.ends.push_back(j + 1);
    }
  } else {
    for (double r : scan.radius_grid) {
      if (!(r > 0.0) || r > scan.cap) throw PreconditionError("radius grid outside (0, cap]");
      const auto e = static_cast<std::uint32_t>(
          std::lower_bound(pb.nb.begin(), pb.nb.end(), r,
                           [](const Neighbor& a, double v) { return a.d < v; }) -
          pb.nb.begin());
      if (e > 0 && e <= limit) pb.ends.push_back(e);
    }
    std::sort(pb.ends.begin(), pb.ends.end());
    pb.ends.erase(std::unique(pb.ends.begin(), pb.ends.end()), pb.ends.end());
  }
  return pb;
}

std::vector<double> ball_averages(const Space& space, const PrefixBalls& pb,
                                  std::span<const double> values) {
  std::vector<double> out;
  out.reserve(pb.ends.size());
  double sw = 0.0, swf = 0.0;
  std::uint32_t j = 0;
  for (std::uint32_t e : pb.ends) {
    for (; j < e; ++j) {
      const Id id = pb.nb[j].id;
      const double w = space.weight(id);
      sw += w;
      swf += w * values[static_cast<std::size_t>(id)];
    }
    out.push_back(swf / sw);
  }
  return out;
}

std::vector<double> ball_oscillations(const Space& space, const PrefixBalls& pb,
                                      std::span<const double> values, double p) {
  std::vector<double> out;
  if (pb.ends.empty()) return out;
  out.reserve(pb.ends.size());
  const std::size_t K = pb.ends.back();
  // Shift by the center value: oscillation is shift invariant and constant
  // data then gives exactly zero.
  const double shift = values[static_cast<std::size_t>(pb.nb[0].id)];
  std::vector<double> g(K), w(K);
  for (std::size_t j = 0; j < K; ++j) {
    g[j] = values[static_cast<std::size_t>(pb.nb[j].id)] - shift;
    w[j] = space.weight(pb.nb[j].id);
  }

  if (p == 1.0) {
    std::vector<std::uint32_t> order(K);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return g[a] < g[b] || (g[a] == g[b] && a < b);
    });
    std::vector<std::uint32_t> rank(K);
    std::vector<double> sorted_g(K);
    for (std::size_t r = 0; r < K; ++r) {
      rank[order[r]] = static_cast<std::uint32_t>(r);
      sorted_g[r] = g[order[r]];
    }
    Fenwick fw(K), fg(K);
    double W = 0.0, S = 0.0;
    std::uint32_t j = 0;
    for (std::uint32_t e : pb.ends) {
      for (; j < e; ++j) {
        fw.add(rank[j], w[j]);
        fg.add(rank[j], w[j] * g[j]);
        W += w[j];
        S += w[j] * g[j];
      }
      const double m = S / W;
      const auto lo = static_cast<std::size_t>(
          std::upper_bound(sorted_g.begin(), sorted_g.end(), m) - sorted_g.begin());
      const double w_lo = fw.prefix(lo), s_lo = fg.prefix(lo);
      const double osc = (S - s_lo - m * (W - w_lo)) + (m * w_lo - s_lo);
      out.push_back(std::max(0.0, osc / W));
    }
    return out;
  }

  double W = 0.0, S = 0.0;
  std::uint32_t j = 0;
  for (std::uint32_t e : pb.ends) {
    for (; j < e; ++j) {
      W += w[j];
      S += w[j] * g[j];
    }
    const double m = S / W;
    double acc = 0.0;
    for (std::uint32_t i = 0; i < e; ++i) acc += w[i] * std::pow(std::fabs(g[i] - m), p);
    out.push_back(std::pow(acc / W, 1.0 / p));
  }
  return out;
}

PointwiseSup max_average(const Space& space, std::span<const Id> centers, const BallScan& scan,
                         std::span<const double> values, const Mask& eval_mask) {
  return pointwise_sweep(space, centers, scan, eval_mask, [&](const PrefixBalls& pb) {
    return ball_averages(space, pb, values);
  });
}

PointwiseSup max_oscillation(const Space& space, std::span<const Id> centers,
                             const BallScan& scan, std::span<const double> values,
                             const Mask& eval_mask, double p) {
  return pointwise_sweep(space, centers, scan, eval_mask, [&](const PrefixBalls& pb) {
    return ball_oscillations(space, pb, values, p);
  });
}

GlobalSup sup_oscillation(const Space& space, std::span<const Id> centers, const BallScan& scan,
                          std::span<const double> values, double p, const Mask* inside) {
  std::vector<GlobalSup> per(centers.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(centers.size()); ++c) {
    const Id center = centers[static_cast<std::size_t>(c)];
    const PrefixBalls pb = prefix_balls(space, center, scan);
    const auto vals = ball_oscillations(space, pb, values, p);
    GlobalSup g;
    g.center = center;
    g.candidates = static_cast<std::int64_t>(vals.size());
    for (std::size_t k = 0; k < vals.size(); ++k) {
      if (vals[k] > g.value) {
        g.value = vals[k];
        g.radius = pb.nb[pb.ends[k] - 1].d;
      }
    }
    if (inside && !pb.ends.empty()) {
      for (std::uint32_t j = 0; j < pb.ends.back(); ++j) {
        g.contained = g.contained && (*inside)[static_cast<std::size_t>(pb.nb[j].id)];
      }
    }
    per[static_cast<std::size_t>(c)] = g;
  }
  GlobalSup out;
  std::int64_t total = 0;
  bool contained = true;
  for (const auto& g : per) {
    total += g.candidates;
    contained = contained && g.contained;
    if (g.value > out.value || (out.center < 0 && g.value == out.value)) {
      out.value = g.value;
      out.center = g.center;
      out.radius = g.radius;
    }
  }
  out.candidates = total;
  out.contained = contained;
  return out;
}

}  // namespace lhs::kernels
