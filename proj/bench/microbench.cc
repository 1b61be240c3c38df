// Serial reference vs OpenMP kernels.
//
//   ./build/bench/devsel_microbench --benchmark_filter=BruteForce

#include <benchmark/benchmark.h>

#include "devsel/bench.h"
#include "devsel/scoring_kernel.h"
#include "devsel/solvers.h"

namespace devsel {
namespace {

struct Fixture {
  SynthesizedInstance instance;
  CandidateSets candidates;
};

const Fixture& InstanceFor(int f) {
  static std::map<int, Fixture> cache;
  auto it = cache.find(f);
  if (it == cache.end()) {
    BenchSpec spec;
    spec.planted_p[8] = 0.2;
    Fixture fx{SynthesizeInstance(spec, f, RunSeed(0, f, 0)), {}};
    fx.candidates = FilterCandidates(fx.instance.network, fx.instance.workflow);
    it = cache.emplace(f, std::move(fx)).first;
  }
  return it->second;
}

void BM_BruteForceSerial(benchmark::State& state) {
  const Fixture& fx = InstanceFor(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(SolveBruteForce(fx.candidates, fx.instance.model).score);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(fx.candidates.SearchSpaceSize()));
}
BENCHMARK(BM_BruteForceSerial)->DenseRange(4, 8)->Unit(benchmark::kMillisecond);

void BM_BruteForceParallel(benchmark::State& state) {
  const Fixture& fx = InstanceFor(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        SolveBruteForceParallel(fx.candidates, fx.instance.model, {}, 0).score);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(fx.candidates.SearchSpaceSize()));
}
BENCHMARK(BM_BruteForceParallel)->DenseRange(4, 8)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_ReferenceScore(benchmark::State& state) {
  const Fixture& fx = InstanceFor(7);
  for (auto _ : state) benchmark::DoNotOptimize(Score(fx.instance.model, fx.instance.planted));
}
BENCHMARK(BM_ReferenceScore);

void BM_KernelScore(benchmark::State& state) {
  const Fixture& fx = InstanceFor(7);
  ScoringKernel kernel(fx.instance.model, fx.candidates);
  std::vector<int> genes(7, 0);
  for (auto _ : state) benchmark::DoNotOptimize(kernel.Raw(genes));
}
BENCHMARK(BM_KernelScore);

// Whole benchmark cells (synthesize + all four solvers) with reduced
// metaheuristic budgets, serial loop vs OpenMP team.
void BM_BenchCells(benchmark::State& state) {
  BenchSpec spec;
  spec.function_counts = {5};
  spec.runs = 8;
  spec.solver_config.ga.generations = 50;
  spec.solver_config.sa.steps = 20000;
  spec.serial = state.range(0) == 0;
  for (auto _ : state) benchmark::DoNotOptimize(RunBenchmark(spec).size());
}
BENCHMARK(BM_BenchCells)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond)
    ->UseRealTime();

}  // namespace
}  // namespace devsel

BENCHMARK_MAIN();
