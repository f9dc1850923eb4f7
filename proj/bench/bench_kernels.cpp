// Serial reference vs OpenMP kernels. Arg 0 is Exec::Serial, 1 is Exec::Parallel.

#include <benchmark/benchmark.h>

#include <cmath>

#include "mmv2x/sweep.hpp"

using namespace mmv2x;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::Parallel : Exec::Serial; }

void label(benchmark::State& st) { st.SetLabel(st.range(0) ? "parallel" : "serial"); }

void BM_ModelBuild(benchmark::State& st) {
  const ValidatedConfig cfg = validate(SystemConfig{});
  for (auto _ : st) {
    const Model m(cfg, NumericsPolicy{}, GridOptions{}, exec_of(st));
    benchmark::DoNotOptimize(m.tail_mass());
  }
  label(st);
}

void BM_ConditionedThresholdSweep(benchmark::State& st) {
  SystemConfig s;
  s.interference_model = InterferenceModel::Conditioned;
  const ValidatedConfig cfg = validate(s);
  for (auto _ : st) {
    const Model m(cfg, NumericsPolicy{}, GridOptions{}, exec_of(st));
    double acc = 0.0;
    for (double tdb = -20.0; tdb <= 40.0; tdb += 10.0) acc += m.connectivity(std::pow(10.0, tdb / 10.0));
    benchmark::DoNotOptimize(acc);
  }
  label(st);
}

void BM_SimulatorRun(benchmark::State& st) {
  const Simulator sim(validate(SystemConfig{}), NumericsPolicy{});
  McOptions o;
  o.drops = 2000;
  o.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(sim.run(o).size());
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(o.drops));
  label(st);
}

void BM_AnalyticSweep(benchmark::State& st) {
  SweepSpec s;
  s.param = "speed_kmh";
  s.values = linear_grid(0.0, 120.0, 4);
  s.metrics = {Metric::Connectivity};
  s.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(run_sweep(s).rows.size());
  label(st);
}

}  // namespace

BENCHMARK(BM_ModelBuild)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConditionedThresholdSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulatorRun)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AnalyticSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
