// Serial reference vs OpenMP kernels. Thread count follows POISSON_CS_THREADS.

#include "pcs/harness.hpp"
#include "pcs/poisson.hpp"

#include <benchmark/benchmark.h>

using namespace pcs;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_LambdaBrute(benchmark::State& st) {
  const Basis b = make_basis(BasisKind::DCT, 64);
  LambdaBruteOptions o;
  o.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(lambda_brute(b, 3, o));
}

void BM_Rip(benchmark::State& st) {
  const auto sm = bernoulli_sensing(64, 48, 1);
  const Basis b = make_basis(BasisKind::DCT, 48);
  RipOptions o;
  o.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(estimate_rip(sm, b, 2, o).delta_hat);
}

void BM_L0(benchmark::State& st) {
  const Basis b = make_basis(BasisKind::DCT, 16);
  const auto sm = bernoulli_sensing(32, 16, 2);
  const double T = 2e4;
  const Counts y = poisson_sample(T * (sm.A * packing_signal(b, 2, 3).f), 4);
  L0Options o;
  o.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(l0_exhaustive(y, sm, b, T, 2, o).objective);
}

void BM_Sweep(benchmark::State& st) {
  ExperimentConfig c;
  c.p = 64;
  c.n = {32};
  c.s = {4};
  c.trials = 8;
  c.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(sweep(c, SweepAxis::T, {1e4, 1e8}).back().mean_mse);
}

}  // namespace

BENCHMARK(BM_LambdaBrute)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Rip)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_L0)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
