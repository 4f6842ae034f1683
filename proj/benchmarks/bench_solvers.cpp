#include <benchmark/benchmark.h>

#include "otlab/dyadic.hpp"
#include "otlab/samplers.hpp"
#include "otlab/torus.hpp"
#include "otlab/transport.hpp"

using namespace otlab;

static void BM_AdaptivePadding(benchmark::State& state) {
  const double n = static_cast<double>(state.range(0));
  const auto pts = sample_poisson(WindowSpec::interval(n), {4, 0});
  for (auto _ : state) benchmark::DoNotOptimize(adaptive_padding(pts, CostSpec{0.5}, 0.25, default_padding(n)));
}
BENCHMARK(BM_AdaptivePadding)->RangeMultiplier(2)->Range(32, 256)->Unit(benchmark::kMillisecond);

static void BM_Dyadic(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  const auto pts = sample_poisson(WindowSpec::interval(std::ldexp(1.0, K)), {5, 0});
  for (auto _ : state) benchmark::DoNotOptimize(build_dyadic(pts.points, K, 0.3, 1.0 / 16.0));
}
BENCHMARK(BM_Dyadic)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

static void BM_TorusCircle(benchmark::State& state) {
  const auto cfg = sample_torus_surrogate(Poisson{}, static_cast<std::size_t>(state.range(0)), {6, 0});
  for (auto _ : state) benchmark::DoNotOptimize(solve_torus_allocation(cfg, 1.0));
}
BENCHMARK(BM_TorusCircle)->RangeMultiplier(4)->Range(64, 4096);
