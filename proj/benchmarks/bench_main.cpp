#include <benchmark/benchmark.h>

#include <random>

#include "csmpc/conformal.hpp"
#include "csmpc/dynamics.hpp"
#include "csmpc/planner.hpp"
#include "csmpc/scenario.hpp"

using namespace csmpc;

static void BM_ConformalQuantile(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> scores(static_cast<std::size_t>(state.range(0)));
  for (double& s : scores) s = e(rng);
  for (auto _ : state) benchmark::DoNotOptimize(conformal_quantile(scores, 0.0025));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ConformalQuantile)->RangeMultiplier(4)->Range(64, 16384)->Complexity(benchmark::oN);

static void BM_Calibrate(benchmark::State& state) {
  const Dataset d = generate_dataset(ScenarioConfig{}, 100, static_cast<std::size_t>(state.range(0)), 1, 3);
  const PredictorSpec ar = fit_autoregressive(d.select(Split::Train), 4);
  for (auto _ : state) benchmark::DoNotOptimize(calibrate(d, ar, 0.05, 20, 20, ScoreMode::JointNorm));
}
BENCHMARK(BM_Calibrate)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_Rollout(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<ControlInput> controls(static_cast<std::size_t>(state.range(0)));
  for (auto& c : controls) c = {u(rng), u(rng)};
  const bool sens = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(rollout({0, 0, 0, 1}, controls, VehicleParams{}, sens));
}
BENCHMARK(BM_Rollout)->Args({20, 0})->Args({20, 1})->Args({40, 1});

static void BM_SolveOcp(benchmark::State& state) {
  const ScenarioConfig sc;
  const Dataset d = generate_dataset(sc, 200, 500, 1, 4);
  const PredictorSpec ar = fit_autoregressive(d.select(Split::Train), 4);
  const CalibrationTable table = calibrate(d, ar, 0.05, 20, 20, ScoreMode::JointNorm);
  const Trajectory env = d.select(Split::Test).front();
  const PredictionSet pred = predict(ar, env.history_through(0), 0, 20, 20);
  PlannerConfig cfg;
  const OcpSpec spec = make_ocp(0, 20, pred, table, cfg);
  const SolverConfig solver;
  for (auto _ : state) benchmark::DoNotOptimize(solve_ocp(0, {0, 0, 0, 1}, spec, solver));
}
BENCHMARK(BM_SolveOcp)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
