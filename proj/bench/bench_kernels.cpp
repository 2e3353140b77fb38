#include <benchmark/benchmark.h>

#include "lhs/bmo_jn.hpp"
#include "lhs/functions.hpp"
#include "lhs/maximal.hpp"

using namespace lhs;

namespace {

Instance grid(std::size_t N) {
  BuiltinParams p;
  p.N = N;
  return instantiate_builtin("grid1d", p);
}

void BM_LocalMaximal(benchmark::State& state) {
  const auto I = grid(static_cast<std::size_t>(state.range(0)));
  const auto f = function_library("log_singularity", {}, I.space);
  for (auto _ : state) benchmark::DoNotOptimize(local_maximal(I.space, I.structure, f, 1));
  state.SetComplexityN(state.range(0));
}

void BM_LocalMaximalReference(benchmark::State& state) {
  const auto I = grid(static_cast<std::size_t>(state.range(0)));
  const auto f = function_library("log_singularity", {}, I.space);
  for (auto _ : state) benchmark::DoNotOptimize(local_maximal_reference(I.space, I.structure, f, 1));
}

void BM_BmoSeminorm(benchmark::State& state) {
  const auto I = grid(static_cast<std::size_t>(state.range(0)));
  const auto f = function_library("random_piecewise", {}, I.space);
  for (auto _ : state) benchmark::DoNotOptimize(bmo_seminorm(I.space, I.structure, f, 1));
}

void BM_BmoPSeminorm(benchmark::State& state) {
  const auto I = grid(static_cast<std::size_t>(state.range(0)));
  const auto f = function_library("random_piecewise", {}, I.space);
  for (auto _ : state) benchmark::DoNotOptimize(bmo_p_seminorm(I.space, I.structure, f, 1, 2.0));
}

}  // namespace

BENCHMARK(BM_LocalMaximal)->RangeMultiplier(2)->Range(256, 4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LocalMaximalReference)->RangeMultiplier(2)->Range(256, 1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BmoSeminorm)->RangeMultiplier(2)->Range(256, 4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BmoPSeminorm)->RangeMultiplier(2)->Range(256, 4096)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
