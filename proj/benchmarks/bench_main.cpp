#include <benchmark/benchmark.h>

#include "bailout/constraint_solver.hpp"
#include "bailout/mc_simulator.hpp"

using namespace bailout;

namespace {

const LevyModel kJumpDiffusion(1.0, 0.5, CompoundPoisson{0.4, GammaJumps{1.0, 2.0}});
constexpr double kQ = 0.1;

const ScaleEngine& warm_engine() {
  static const ScaleEngine e = [] {
    ScaleEngine engine(kJumpDiffusion, kQ);
    engine.reserve(40.0);
    return engine;
  }();
  return e;
}

// Fresh engine: Laplace inversion of the grid up to x_max.
void BM_ScaleGridBuild(benchmark::State& state) {
  const double x_max = static_cast<double>(state.range(0));
  for (auto _ : state) {
    ScaleEngine e(kJumpDiffusion, kQ);
    e.reserve(x_max);
    benchmark::DoNotOptimize(e.w(x_max));
  }
}
BENCHMARK(BM_ScaleGridBuild)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_ScaleLookup(benchmark::State& state) {
  const auto& e = warm_engine();
  double x = 0;
  for (auto _ : state) {
    x = x < 30 ? x + 0.0137 : 0.0;
    benchmark::DoNotOptimize(e.values(x));
  }
}
BENCHMARK(BM_ScaleLookup);

void BM_OptimalThresholds(benchmark::State& state) {
  const auto& e = warm_engine();
  const double lambda = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(optimal_thresholds(e, lambda, 0.05));
}
BENCHMARK(BM_OptimalThresholds)->Arg(2)->Arg(9)->Unit(benchmark::kMicrosecond);

void BM_SolveNoCost(benchmark::State& state) {
  const auto& e = warm_engine();
  for (auto _ : state) benchmark::DoNotOptimize(solve_no_cost(e, 3.0, 2.7));
}
BENCHMARK(BM_SolveNoCost)->Unit(benchmark::kMicrosecond);

void BM_SolveWithCost(benchmark::State& state) {
  const auto& e = warm_engine();
  for (auto _ : state) benchmark::DoNotOptimize(solve_with_cost(e, 3.0, 2.7, 0.05));
}
BENCHMARK(BM_SolveWithCost)->Unit(benchmark::kMillisecond);

// 1000 paths per iteration, single thread.
void BM_SimulateBarrier(benchmark::State& state) {
  SimConfig cfg;
  cfg.n_paths = 1000;
  cfg.time_step = 1e-3;
  cfg.kill_after = 30.0;
  cfg.threads = 1;
  const double a = optimal_barrier(warm_engine(), 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_policy(kJumpDiffusion, Barrier{a}, 1.0, kQ, cfg));
}
BENCHMARK(BM_SimulateBarrier)->Unit(benchmark::kMillisecond);

void BM_SimulatePair(benchmark::State& state) {
  SimConfig cfg;
  cfg.n_paths = 1000;
  cfg.time_step = 1e-3;
  cfg.kill_after = 30.0;
  cfg.threads = 1;
  const auto t = optimal_thresholds(warm_engine(), 2.0, 0.05);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        simulate_policy(kJumpDiffusion, ReflectedPair{t.c1, t.c2, 0.05}, 1.0, kQ, cfg));
}
BENCHMARK(BM_SimulatePair)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
