#include <benchmark/benchmark.h>

#include "bench_common.hpp"

using namespace ppca;
using ppca::bench::make_problem;

static void BM_EnergyTotal(benchmark::State& state) {
  const auto problem = make_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto e = energy_total(problem.model, problem.data, problem.coeffs, problem.penalties);
    benchmark::DoNotOptimize(e);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EnergyTotal)->RangeMultiplier(4)->Range(4, 256)->Complexity(benchmark::oN);

static void BM_GradMeans(benchmark::State& state) {
  const auto problem = make_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto g = grad_means(problem.model, problem.data, problem.coeffs, problem.penalties);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_GradMeans)->RangeMultiplier(4)->Range(4, 256);

static void BM_GradBases(benchmark::State& state) {
  const auto problem = make_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto g = grad_bases(problem.model, problem.data, problem.coeffs, problem.penalties);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_GradBases)->RangeMultiplier(4)->Range(4, 256);

static void BM_SolveMeansClosedForm(benchmark::State& state) {
  const auto problem = make_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto means = solve_means_closed_form(problem.model, problem.data, problem.coeffs,
                                         problem.penalties);
    benchmark::DoNotOptimize(means);
  }
}
BENCHMARK(BM_SolveMeansClosedForm)->RangeMultiplier(4)->Range(4, 256);

static void BM_SolveCoefficients(benchmark::State& state) {
  const auto problem = make_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto solution = solve_coefficients(problem.model, problem.data);
    benchmark::DoNotOptimize(solution);
  }
}
BENCHMARK(BM_SolveCoefficients)->RangeMultiplier(4)->Range(4, 256);
