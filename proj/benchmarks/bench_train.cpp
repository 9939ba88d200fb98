#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "ppca/synth.hpp"

using namespace ppca;

// One alternating cycle (closed-form means, 500 basis steps, coefficient
// solve) on the default synthetic benchmark.
static void BM_SyntheticCycle(benchmark::State& state) {
  SynthSpec spec;
  const SyntheticData synthetic = generate_dataset(spec);
  TrainConfig config;
  config.penalties = Penalties{0.008, 4.2, 20.0};
  config.cycles = 1;
  config.basis_steps = 500;
  config.basis_rate = 1e-3;
  config.mean_solver = MeanSolver::closed_form;
  for (auto _ : state) {
    auto result = train(synthetic.data, default_synthetic_grid(), 2, config);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_SyntheticCycle)->Unit(benchmark::kMillisecond);

static void BM_DescendBases(benchmark::State& state) {
  const auto problem = ppca::bench::make_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto bases = descend_bases(problem.model, problem.data, problem.coeffs,
                               problem.penalties, 1e-5, 100);
    benchmark::DoNotOptimize(bases);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DescendBases)->RangeMultiplier(4)->Range(4, 256)->Complexity(benchmark::oN);

BENCHMARK_MAIN();
