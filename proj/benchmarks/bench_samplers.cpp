#include <benchmark/benchmark.h>

#include "otlab/samplers.hpp"

using namespace otlab;

static void BM_Poisson(benchmark::State& state) {
  const WindowSpec w = WindowSpec::interval(static_cast<double>(state.range(0)));
  std::uint64_t r = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_poisson(w, {1, r++}));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Poisson)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

static void BM_SineDpp(benchmark::State& state) {
  const WindowSpec w = WindowSpec::interval(static_cast<double>(state.range(0)));
  std::uint64_t r = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_sine_dpp(w, 8, {2, r++}));
}
BENCHMARK(BM_SineDpp)->RangeMultiplier(2)->Range(16, 128)->Unit(benchmark::kMillisecond);

static void BM_CircularBeta(benchmark::State& state) {
  std::uint64_t r = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_circular_beta(static_cast<std::size_t>(state.range(0)), 2.0, {3, r++}));
}
BENCHMARK(BM_CircularBeta)->RangeMultiplier(4)->Range(32, 512)->Unit(benchmark::kMillisecond);
