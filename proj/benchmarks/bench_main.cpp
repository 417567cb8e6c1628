#include <benchmark/benchmark.h>

#include <random>

#include "stabreg/checker.hpp"
#include "stabreg/label.hpp"
#include "stabreg/simulation.hpp"

namespace {

using namespace stabreg;

void BM_NextB(benchmark::State& state) {
  const auto params = LabelParams::for_k(static_cast<std::uint64_t>(state.range(0)));
  std::mt19937_64 rng(1);
  std::vector<Label> s;
  for (std::uint32_t i = 0; i < params.k; ++i) s.push_back(random_label(params, rng));
  for (auto _ : state) benchmark::DoNotOptimize(next_b(s, params));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NextB)->RangeMultiplier(4)->Range(4, 1024)->Complexity();

void BM_PrecedesB(benchmark::State& state) {
  const auto params = LabelParams::for_k(static_cast<std::uint64_t>(state.range(0)));
  std::mt19937_64 rng(2);
  const Label a = random_label(params, rng);
  const Label b = random_label(params, rng);
  for (auto _ : state) benchmark::DoNotOptimize(precedes_b(a, b));
}
BENCHMARK(BM_PrecedesB)->Arg(2)->Arg(64)->Arg(340);

void BM_Simulation(benchmark::State& state) {
  Scenario s;
  s.n = static_cast<std::size_t>(state.range(0));
  s.c = 2;
  s.r = 64;
  s.writes = 200;
  s.corruption = state.range(1) ? CorruptionMode::kRandom : CorruptionMode::kNone;
  std::uint64_t steps = 0;
  for (auto _ : state) {
    ++s.seed;
    steps += run_scenario(s).metrics.steps;
  }
  state.counters["steps/s"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Simulation)->Args({3, 0})->Args({5, 0})->Args({5, 1})->Unit(benchmark::kMillisecond);

void BM_Checker(benchmark::State& state) {
  Scenario s;
  s.n = 5;
  s.c = 3;
  s.writes = static_cast<std::uint64_t>(state.range(0));
  const Trace t = run_scenario(s);
  for (auto _ : state) benchmark::DoNotOptimize(find_stabilization(build_history(t)));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * t.events.size()));
}
BENCHMARK(BM_Checker)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
