#include <benchmark/benchmark.h>

#include "znnqp/integrator.hpp"
#include "znnqp/oracle.hpp"
#include "znnqp/problems.hpp"

using namespace znnqp;

namespace {

void BM_IntegrateBenchmark(benchmark::State& state) {
  const auto kind = static_cast<ModelKind>(state.range(0));
  const auto p = benchmark_problem();
  RunConfig cfg;
  cfg.model = benchmark_preset(kind, 0.0);
  cfg.noise = NoiseChannel::zero(7);
  cfg.y0 = KktState(p.dims(), solve_at(p, cfg.dt).y() + Vec::Constant(7, 0.1), cfg.dt);
  cfg.record_every = 10;
  for (auto _ : state) benchmark::DoNotOptimize(integrate(p, cfg));
  state.SetLabel(std::string(to_string(kind)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.steps()));
}
BENCHMARK(BM_IntegrateBenchmark)->DenseRange(0, 7)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
