// Serial reference vs OpenMP kernels for the forest query and the one-round
// simulation. Results should match; only wall time differs.

#include <benchmark/benchmark.h>

#include <random>

#include "sketchspan/agm.hpp"
#include "sketchspan/distributed.hpp"
#include "sketchspan/graph.hpp"

using namespace sketchspan;

namespace {

ExactGraph bench_graph(std::uint32_t n) {
  std::mt19937_64 rng(n);
  return random_graph(n, 4.0, rng);
}

VertexSketchBank bench_bank(const ExactGraph& g) {
  VertexSketchBank bank(agm_params(g.n(), 1.0 / g.n()), Seed::from_u64(7));
  for (const auto& e : g.edges()) bank.update(e.u, e.v, 1);
  return bank;
}

void BM_Query(benchmark::State& state, Execution exec) {
  const ExactGraph g = bench_graph(static_cast<std::uint32_t>(state.range(0)));
  const VertexSketchBank bank = bench_bank(g);
  for (auto _ : state) benchmark::DoNotOptimize(agm_query(bank, exec));
  state.SetComplexityN(state.range(0));
}

void BM_Simulate(benchmark::State& state, Execution exec) {
  const ExactGraph g = bench_graph(static_cast<std::uint32_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(g, 1.0 / g.n(), Seed::from_u64(7),
                                                         Transport::kSerialized, exec));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Query, serial, Execution::kSerial)->RangeMultiplier(2)->Range(256, 2048)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Query, parallel, Execution::kParallel)->RangeMultiplier(2)->Range(256, 2048)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Simulate, serial, Execution::kSerial)->RangeMultiplier(4)->Range(256, 1024)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Simulate, parallel, Execution::kParallel)->RangeMultiplier(4)->Range(256, 1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
