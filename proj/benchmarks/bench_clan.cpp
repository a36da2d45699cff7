#include <benchmark/benchmark.h>

#include "loopgas/branching.hpp"
#include "loopgas/catalog.hpp"
#include "loopgas/clan.hpp"
#include "loopgas/region.hpp"
#include "loopgas/rng.hpp"

using namespace loopgas;

// One stationary draw per iteration; box side is the sweep parameter.  The
// cost tracks the clan construction, which at beta 2 almost always resolves
// to the empty configuration in one generation.
static void BM_SampleWindow(benchmark::State& state) {
  const int side = int(state.range(0));
  const auto catalog = build_catalog_inside(2.0, 8, Box::square(side));
  Rng rng(20240801);
  for (auto _ : state) {
    auto draw = sample_window(catalog, rng);
    benchmark::DoNotOptimize(draw);
  }
  state.SetLabel("exact draw on a window");
}
BENCHMARK(BM_SampleWindow)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);

static void BM_ClanStatsReplica(benchmark::State& state) {
  const auto catalog = build_catalog(2.0, 8, Box::square(33, -16, -16));
  const std::vector<SpaceTimePoint> targets = {{Plaquette{0, 0, 0}, 0.0}};
  Rng rng(20240801);
  for (auto _ : state) {
    auto batch = clan_stats(targets, catalog, 100, rng);
    benchmark::DoNotOptimize(batch);
  }
  state.SetLabel("100 clan replicas of one plaquette");
}
BENCHMARK(BM_ClanStatsReplica)->Unit(benchmark::kMicrosecond);

static void BM_SimulateGw(benchmark::State& state) {
  const BranchingSpec spec = BranchingSpec::planar(2.0, 10);
  Rng rng(20240801);
  for (auto _ : state) {
    std::uint64_t total = 0;
    for (int r = 0; r < 1000; ++r) total += simulate_gw(spec, rng).progeny;
    benchmark::DoNotOptimize(total);
  }
  state.SetLabel("1000 walk progenies");
}
BENCHMARK(BM_SimulateGw)->Unit(benchmark::kMicrosecond);
