#include <benchmark/benchmark.h>

#include "loopgas/enumerate.hpp"

using namespace loopgas;

static void BM_EnumerateThrough(benchmark::State& state) {
  const int n_max = int(state.range(0));
  for (auto _ : state) {
    auto list = enumerate_through({0, 0, 0}, n_max);
    benchmark::DoNotOptimize(list);
  }
  state.SetLabel("contours through a fixed edge");
}
BENCHMARK(BM_EnumerateThrough)->Arg(6)->Arg(8)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_ShapeTableBuild(benchmark::State& state) {
  const int n_max = int(state.range(0));
  for (auto _ : state) {
    ShapeTable table(n_max);
    benchmark::DoNotOptimize(table);
  }
}
BENCHMARK(BM_ShapeTableBuild)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
