// Serial reference vs OpenMP replication loops.

#include <benchmark/benchmark.h>

#include "frogsim/harness.hpp"

namespace {

frog::ExperimentConfig lln_config() {
  frog::ExperimentConfig cfg;
  cfg.kind = frog::ExperimentKind::lln;
  cfg.n_list = {10000};
  cfg.replications = 64;
  return cfg;
}

frog::ExperimentConfig final_config() {
  frog::ExperimentConfig cfg;
  cfg.kind = frog::ExperimentKind::final_fraction;
  cfg.model = frog::ModelKind::geometric;
  cfg.p_grid = {0.8};
  cfg.n_list = {10000};
  cfg.replications = 64;
  return cfg;
}

frog::ExecPolicy policy(const benchmark::State& state) {
  return state.range(0) == 0 ? frog::ExecPolicy::serial() : frog::ExecPolicy{};
}

void BM_Lln(benchmark::State& state) {
  const auto cfg = lln_config();
  const auto exec = policy(state);
  for (auto _ : state) benchmark::DoNotOptimize(frog::lln_experiment(cfg, exec));
}
BENCHMARK(BM_Lln)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_FinalFraction(benchmark::State& state) {
  const auto cfg = final_config();
  const auto exec = policy(state);
  for (auto _ : state) benchmark::DoNotOptimize(frog::final_fraction_experiment(cfg, exec));
}
BENCHMARK(BM_FinalFraction)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
