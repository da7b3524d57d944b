// The parallel kernels must reproduce the serial reference bit for bit.

#include "pcs/harness.hpp"
#include "pcs/poisson.hpp"

#include <doctest.h>
#include <omp.h>

#include <cstdlib>

using namespace pcs;

TEST_CASE("worker count honours the environment cap") {
  setenv("POISSON_CS_THREADS", "1", 1);
  CHECK(worker_count() == 1);
  setenv("POISSON_CS_THREADS", "bogus", 1);
  CHECK(worker_count() == omp_get_max_threads());
  unsetenv("POISSON_CS_THREADS");
  CHECK(worker_count() == omp_get_max_threads());
}

TEST_CASE("lambda brute force") {
  for (auto kind : {BasisKind::DCT, BasisKind::DHT, BasisKind::DWT}) {
    const Basis b = make_basis(kind, 32);
    for (int k = 1; k <= 3; ++k) {
      LambdaBruteOptions s, p;
      s.exec = Exec::Serial;
      p.exec = Exec::Parallel;
      CHECK(lambda_brute(b, k, s) == lambda_brute(b, k, p));
    }
  }
}

TEST_CASE("RIP estimate") {
  const auto sm = bernoulli_sensing(48, 32, 3);
  const Basis b = make_basis(BasisKind::DWT, 32);
  RipOptions s, p;
  s.exec = Exec::Serial;
  const auto a = estimate_rip(sm, b, 2, s), c = estimate_rip(sm, b, 2, p);
  CHECK(a.delta_hat == c.delta_hat);
  CHECK(a.supports_checked == c.supports_checked);
  s.sample = p.sample = true;
  s.budget = p.budget = 100;
  s.samples = p.samples = 3000;
  CHECK(estimate_rip(sm, b, 2, s).delta_hat == estimate_rip(sm, b, 2, p).delta_hat);
}

TEST_CASE("l0 exhaustive search") {
  const Basis b = make_basis(BasisKind::DCT, 16);
  const auto sm = bernoulli_sensing(32, 16, 4);
  const auto sig = packing_signal(b, 2, 6);
  const double T = 2e4;
  const Counts y = poisson_sample(T * (sm.A * sig.f), 7);
  L0Options s, p;
  s.exec = Exec::Serial;
  const auto a = l0_exhaustive(y, sm, b, T, 2, s), c = l0_exhaustive(y, sm, b, T, 2, p);
  CHECK(a.objective == c.objective);
  CHECK(a.best_index == c.best_index);
  CHECK(a.theta_candidate == c.theta_candidate);
  CHECK(a.estimate.f == c.estimate.f);
}

TEST_CASE("sweep output does not depend on threading") {
  ExperimentConfig c;
  c.p = 32;
  c.n = {24};
  c.s = {3};
  c.trials = 6;
  c.master_seed = 3;
  ExperimentConfig serial = c;
  serial.exec = Exec::Serial;
  const std::vector<double> Ts{1e3, 1e6, 1e9};
  const auto a = to_csv(sweep(c, SweepAxis::T, Ts));
  CHECK(a == to_csv(sweep(serial, SweepAxis::T, Ts)));
  omp_set_num_threads(3);
  CHECK(a == to_csv(sweep(c, SweepAxis::T, Ts)));
}
