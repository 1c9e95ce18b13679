#include <benchmark/benchmark.h>

#include "hpe/dynamics.hpp"
#include "hpe/measure.hpp"
#include "hpe/nonlinearity.hpp"

using namespace hpe;

namespace {

void BM_b_truncated(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto w = sample_mu(m, 1);
  for (auto _ : state) benchmark::DoNotOptimize(b_truncated(w, m));
  state.SetComplexityN(m);
}
BENCHMARK(BM_b_truncated)->RangeMultiplier(2)->Range(4, 32)->Complexity();

void BM_evaluator(benchmark::State& state, NonlinearityMethod method) {
  const int m = static_cast<int>(state.range(0));
  const auto w = sample_mu(m, 1);
  NonlinearityEvaluator eval(m, method);
  std::vector<double> out(w.dense().size());
  for (auto _ : state) {
    eval.apply(w.dense(), out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(m);
}
BENCHMARK_CAPTURE(BM_evaluator, table, NonlinearityMethod::direct)
    ->RangeMultiplier(2)
    ->Range(4, 64)
    ->Complexity();
BENCHMARK_CAPTURE(BM_evaluator, fft, NonlinearityMethod::fast)
    ->RangeMultiplier(2)
    ->Range(4, 256)
    ->Complexity();

void BM_interaction_table_build(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(InteractionTable(m).size());
}
BENCHMARK(BM_interaction_table_build)->RangeMultiplier(2)->Range(8, 32);

void BM_galerkin_step(benchmark::State& state) {
  SimConfig cfg;
  cfg.m = static_cast<int>(state.range(0));
  cfg.fast_nonlinearity = cfg.m >= 32;
  GalerkinSimulator sim(cfg, sample_mu(cfg.m, 1), 1);
  for (auto _ : state) sim.step();
}
BENCHMARK(BM_galerkin_step)->RangeMultiplier(2)->Range(8, 64);

}  // namespace

BENCHMARK_MAIN();
