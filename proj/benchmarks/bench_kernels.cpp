#include <benchmark/benchmark.h>

#include "znnqp/models.hpp"
#include "znnqp/oracle.hpp"
#include "znnqp/problems.hpp"
#include "znnqp/robot.hpp"

using namespace znnqp;

namespace {

KktState perturbed_state(const TimeVariantQP& p, double t) {
  return KktState(p.dims(), solve_at(p, t).y() + Vec::Constant(p.dims().total(), 0.05), t);
}

void BM_AssembleBlocks(benchmark::State& state) {
  const auto p = benchmark_problem();
  const QpSample sample = p.sample(0.7);
  const KktState st = perturbed_state(p, 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_blocks(sample, st));
}
BENCHMARK(BM_AssembleBlocks);

void BM_Rhs(benchmark::State& state) {
  const auto kind = static_cast<ModelKind>(state.range(0));
  const auto p = benchmark_problem();
  const KktState st = perturbed_state(p, 0.7);
  const KktBlocks blocks = assemble_blocks(p, st);
  const Vec eps = blocks.P * st.y + blocks.q;
  const ModelSpec spec = benchmark_preset(kind, 0.0);
  const Vec delta = Vec::Zero(st.y.size());
  for (auto _ : state) benchmark::DoNotOptimize(rhs(spec, blocks, eps, st.y, 0.7, delta, RhsContext{}));
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_Rhs)->DenseRange(0, 7);

void BM_OracleBenchmark(benchmark::State& state) {
  const QpData data = benchmark_problem().sample(1.3).value;
  for (auto _ : state) benchmark::DoNotOptimize(solve_at(data, 1.3));
}
BENCHMARK(BM_OracleBenchmark);

void BM_OracleBoxes(benchmark::State& state) {
  // n joints with a two-sided box each: 2n inequalities, 4^n active sets.
  const auto n = static_cast<Eigen::Index>(state.range(0));
  QpData q;
  q.H = Mat::Identity(n, n);
  q.rho = Vec::LinSpaced(n, -2.0, 2.0);
  q.A = Mat::Ones(1, n);
  q.b = Vec::Constant(1, 0.1);
  q.C.resize(2 * n, n);
  q.C << Mat::Identity(n, n), -Mat::Identity(n, n);
  q.d = Vec::Ones(2 * n);
  for (auto _ : state) benchmark::DoNotOptimize(solve_at(q));
}
BENCHMARK(BM_OracleBoxes)->DenseRange(2, 7)->Unit(benchmark::kMicrosecond);

void BM_Jacobian(benchmark::State& state) {
  ArmModel arm;
  for (int i = 0; i < 7; ++i) arm.joints.push_back({0.1 * i, 1.5707963267948966 * (i % 2 ? 1 : -1), 0.3, 0.0});
  const Vec q = Vec::LinSpaced(7, -1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(jacobian(arm, q));
}
BENCHMARK(BM_Jacobian);

}  // namespace
