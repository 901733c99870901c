// Serial reference against the OpenMP analyzer on Z-level finishing paths.

#include <benchmark/benchmark.h>

#include <map>

#include "kerf/analyzer.hpp"
#include "support/scenarios.hpp"

namespace {

const kerf::ToolPath& path_for(int blocks) {
  static std::map<int, kerf::ToolPath> cache;
  auto it = cache.find(blocks);
  if (it == cache.end()) it = cache.emplace(blocks, kerf::testing::zlevel_path(blocks / 1000, 1000, 60)).first;
  return it->second;
}

void BM_AnalyzeSerial(benchmark::State& state) {
  const kerf::ToolPath& p = path_for(static_cast<int>(state.range(0)));
  const kerf::MachineLimits m = kerf::testing::illustrative_machine();
  for (auto _ : state) benchmark::DoNotOptimize(kerf::analyze_serial(p, m));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.blocks.size()));
}

void BM_AnalyzeParallel(benchmark::State& state) {
  const kerf::ToolPath& p = path_for(static_cast<int>(state.range(0)));
  const kerf::MachineLimits m = kerf::testing::illustrative_machine();
  for (auto _ : state) benchmark::DoNotOptimize(kerf::analyze(p, m));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.blocks.size()));
}

}  // namespace

BENCHMARK(BM_AnalyzeSerial)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AnalyzeParallel)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
