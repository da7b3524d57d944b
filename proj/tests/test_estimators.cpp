#include "oracles.hpp"
#include "pcs/estimators.hpp"
#include "pcs/poisson.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace pcs;

// ---------------------------------------------------------------------------
// Quantization, penalty, Kraft, simplex

TEST_CASE("quantization level examples") {
  auto g = quantization_level(0.0, 1.0, 0.0, 1.0, -1.0);
  CHECK(g.K == 1);
  CHECK(g.levels == std::vector<double>{0.0});

  g = quantization_level(8.0 / std::numbers::ln2, 1.0, 0.0, 1.0, -1.0);
  CHECK(quantization_k_star(8.0 / std::numbers::ln2, 1.0, 0.0, 1.0, -1.0) == doctest::Approx(1.0));
  CHECK(g.K == 1);

  g = quantization_level(32.0 / std::numbers::ln2, 1.0, 0.0, 1.0, -1.0);
  CHECK(g.K == 2);
  CHECK(g.levels == std::vector<double>{-1.0, 1.0});

  g = quantization_level(33.0 / std::numbers::ln2, 1.0, 0.0, 1.0, -1.0);
  CHECK(g.K == 3);
  CHECK_THROWS_AS(quantization_level(1.0, 1.0, 0.0, -1.0, 1.0), InvalidArgument);
}

TEST_CASE("grid shape") {
  for (int K = 1; K <= 9; ++K) {
    const auto g = make_grid(K, 0.7);
    REQUIRE(static_cast<int>(g.levels.size()) == K);
    CHECK(std::is_sorted(g.levels.begin(), g.levels.end()));
    for (int i = 0; i < K; ++i) CHECK(g.levels[i] == -g.levels[K - 1 - i]);
    if (K > 1) {
      CHECK(g.levels.front() == -0.7);
      CHECK(g.levels.back() == 0.7);
    }
  }
  CHECK(make_grid(3, 1.0).nonzero_levels() == std::vector<double>{-1.0, 1.0});
}

TEST_CASE("quantize examples") {
  Vector theta(4);
  theta << 0.3, 0.2, -0.9, 0.0;
  auto q = quantize(theta, make_grid(1, 1.0));
  CHECK(q.theta(0) == 0.3);
  CHECK(q.theta.tail(3).cwiseAbs().maxCoeff() == 0.0);

  Vector t2(2);
  t2 << 0.1, 0.4;
  CHECK(quantize(t2, make_grid(2, 1.0)).theta(1) == 1.0);

  const Vector zero = Vector::Zero(5);
  CHECK(quantize(zero, make_grid(3, 1.0)).theta == zero);
  CHECK(quantize(zero, make_grid(1, 1.0)).theta == zero);

  // Tie between 0 and 0.5 on the grid {-1,-.5,0,.5,1} goes toward zero.
  Vector t3(2);
  t3 << 0.1, 0.25;
  CHECK(quantize(t3, make_grid(5, 1.0)).theta(1) == 0.0);
  t3(1) = -0.75;
  CHECK(quantize(t3, make_grid(5, 1.0)).theta(1) == -0.5);

  Vector big(2);
  big << 0.1, 3.0;
  q = quantize(big, make_grid(3, 1.0));
  CHECK(q.clamped);
  CHECK(q.theta(1) == 1.0);
}

TEST_CASE("quantization error bound") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int K : {2, 3, 4, 7}) {
    const auto g = make_grid(K, 1.0);
    for (int t = 0; t < 200; ++t) {
      Vector theta = Vector::Zero(16);
      theta(0) = 0.25;
      const int s = 3;
      for (int i = 0; i < s; ++i) theta(1 + (t + 5 * i) % 15) = u(rng);
      const auto q = quantize(theta, g);
      CHECK(q.max_error <= 1.0 / (K - 1) + 1e-15);
      CHECK((theta - q.theta).squaredNorm() <= s * std::pow(1.0 / (K - 1), 2) + 1e-15);
    }
  }
}

TEST_CASE("penalty") {
  Vector theta = Vector::Zero(16);
  theta(0) = 0.25;
  theta(3) = 0.1;
  theta(9) = -0.2;
  CHECK(penalty(theta, 16, 4, 4) == doctest::Approx(28.0));
  CHECK(penalty_for_count(0, 16, 4, 4) == doctest::Approx(4.0));
  CHECK(penalty_for_count(0, 16, 1, 4) == 0.0);
}

TEST_CASE("Kraft inequality by independent enumeration") {
  // p = 8, s = 2, K = 2: levels {-1, 1}, no zero level among nonzeros.
  const int p = 8, s = 2, K = 2;
  double total = 0;
  for (int j = 0; j <= s; ++j) {
    const double count = std::tgamma(p) / (std::tgamma(j + 1) * std::tgamma(p - j)) * std::pow(K, j);
    total += count * std::exp(-(2 * std::log2(s) + 2 * j * std::log2(p * K)) / 2);
  }
  CHECK(total <= 1.0);
  CHECK(kraft_sum(p, s, K) == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("simplex projection") {
  Vector f(3);
  f << 0.2, 0.3, 0.5;
  CHECK((project_simplex(f) - f).cwiseAbs().maxCoeff() <= 1e-15);
  Vector a(2);
  a << 2.0, 0.0;
  CHECK(project_simplex(a) == Vector::Unit(2, 0));
  Vector b(2);
  b << 0.8, 0.8;
  CHECK((project_simplex(b).array() - 0.5).abs().maxCoeff() <= 1e-15);

  std::mt19937_64 rng(2);
  std::normal_distribution<double> n01(0, 1);
  for (int t = 0; t < 300; ++t) {
    Vector v(9), w(9);
    for (int i = 0; i < 9; ++i) v(i) = n01(rng), w(i) = n01(rng);
    const Vector pv = project_simplex(v), pw = project_simplex(w);
    CHECK(pv.minCoeff() >= 0.0);
    CHECK(std::abs(pv.sum() - 1.0) <= 1e-12);
    CHECK((pv - oracle::simplex_projection(v)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((project_simplex(pv) - pv).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((pv - pw).norm() <= (v - w).norm() + 1e-12);
  }
}

// ---------------------------------------------------------------------------
// Proximal Poisson solver

namespace {

struct Instance {
  Basis basis;
  SensingMatrix sm;
  Signal truth;
  Counts y;
  double T;
};

Instance make_instance(BasisKind kind, int p, int n, int s, double T, std::uint64_t seed) {
  Instance in{make_basis(kind, p), bernoulli_sensing(n, p, seed + 100), {}, {}, T};
  in.truth = packing_signal(in.basis, s, seed);
  in.y = poisson_sample(T * (in.sm.A * in.truth.f), seed + 200);
  return in;
}

}  // namespace

TEST_CASE("objective gradient matches central differences") {
  const auto in = make_instance(BasisKind::DCT, 32, 64, 3, 1e5, 1);
  const PoissonProblem prob(in.y, in.sm.A, in.basis, in.T);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    // Feasible point: coefficients of a random simplex vector.
    const Vector x = analyze(in.basis, oracle::simplex_point(32, rng)).tail(31);
    Vector mu;
    const double h0 = prob.smooth(x, &mu);
    CHECK(std::isfinite(h0));
    const Vector g = prob.gradient(mu);
    Vector fd(31);
    for (int i = 0; i < 31; ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
      Vector a = x, b = x;
      a(i) += h;
      b(i) -= h;
      fd(i) = (prob.smooth(a) - prob.smooth(b)) / (2 * h);
    }
    CHECK((g - fd).norm() / g.norm() < 1e-5);
  }
}

TEST_CASE("smooth part equals nll minus the offset") {
  const auto in = make_instance(BasisKind::DWT, 16, 24, 2, 1e4, 3);
  const PoissonProblem prob(in.y, in.sm.A, in.basis, in.T);
  const Vector x = in.truth.theta.tail(15);
  const Vector mu = in.T * (in.sm.A * in.truth.f);
  CHECK(prob.smooth(x) + prob.nll_offset() == doctest::Approx(nll(in.y, mu)).epsilon(1e-12));
}

TEST_CASE("infinite tau returns the flat image") {
  const auto in = make_instance(BasisKind::DCT, 32, 40, 3, 1e6, 5);
  SolverOptions o;
  o.tau = std::numeric_limits<double>::infinity();
  const auto r = spiral_estimate(in.y, in.sm, in.basis, in.T, o);
  CHECK(r.estimate.theta.tail(31).cwiseAbs().maxCoeff() == 0.0);
  CHECK((r.estimate.f.array() - 1.0 / 32).abs().maxCoeff() <= 1e-15);
  CHECK((r.estimate.f - in.truth.f).squaredNorm() == doctest::Approx(in.truth.theta_bar_energy()).epsilon(1e-10));

  o.tau = -1;
  CHECK_THROWS_AS(spiral_estimate(in.y, in.sm, in.basis, in.T, o), InvalidArgument);
}

TEST_CASE("accepted objectives never increase") {
  for (auto kind : {BasisKind::DCT, BasisKind::DWT}) {
    const auto in = make_instance(kind, 64, 48, 4, 1e8, 7);
    const PoissonProblem prob(in.y, in.sm.A, in.basis, in.T);
    for (double frac : {0.3, 0.03, 0.003}) {
      SolverOptions o;
      o.tau = frac * prob.tau_max();
      const auto r = spiral_solve(prob, in.basis, o);
      REQUIRE(!r.trace.objective.empty());
      for (std::size_t i = 1; i < r.trace.objective.size(); ++i)
        CHECK(r.trace.objective[i] <= r.trace.objective[i - 1]);
      CHECK(r.estimate.f.minCoeff() >= 0.0);
      CHECK(r.estimate.f.sum() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(r.trace.theta_raw.size() == 64);
    }
  }
}

TEST_CASE("projected nonnegativity mode") {
  const auto in = make_instance(BasisKind::DWT, 32, 32, 3, 1e6, 9);
  const PoissonProblem prob(in.y, in.sm.A, in.basis, in.T);
  SolverOptions o;
  o.tau = 0.01 * prob.tau_max();
  o.nonneg = NonnegMode::Projected;
  const auto r = spiral_solve(prob, in.basis, o);
  for (std::size_t i = 1; i < r.trace.objective.size(); ++i) CHECK(r.trace.objective[i] <= r.trace.objective[i - 1]);
  CHECK(synthesize(in.basis, r.trace.theta_raw).minCoeff() >= -1e-12);
  CHECK(r.estimate.membership.nonnegative_ok);
}

TEST_CASE("tau above tau_max keeps the zero solution") {
  const auto in = make_instance(BasisKind::DCT, 32, 40, 3, 1e6, 8);
  const PoissonProblem prob(in.y, in.sm.A, in.basis, in.T);
  SolverOptions o;
  o.tau = prob.tau_max() * 1.01;
  const auto r = spiral_solve(prob, in.basis, o);
  CHECK(r.trace.theta_raw.tail(31).cwiseAbs().maxCoeff() == 0.0);
  const auto grid = auto_tau_grid(prob, 30, 1e-4);
  CHECK(grid.size() == 30);
  CHECK(grid.front() == doctest::Approx(prob.tau_max()));
  CHECK(grid.back() == doctest::Approx(prob.tau_max() * 1e-4));
}

TEST_CASE("oracle tuning recovers packing supports at high intensity") {
  int good = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto in = make_instance(BasisKind::DCT, 128, 256, 5, 1e12, seed);
    const PoissonProblem prob(in.y, in.sm.A, in.basis, in.T);
    const auto o = spiral_oracle(prob, in.basis, auto_tau_grid(prob), SolverOptions{}, in.truth.f);
    const double mse = (o.best.estimate.f - in.truth.f).squaredNorm();
    CHECK(mse == doctest::Approx(o.mse[o.best_index]));
    bool covers = true;
    for (int i = 1; i < 128; ++i)
      if (in.truth.theta(i) != 0.0 && o.best.trace.theta_raw(i) == 0.0) covers = false;
    good += covers && mse < 1e-4;
  }
  CHECK(good >= 18);
}

// ---------------------------------------------------------------------------
// Exhaustive l0 estimator

TEST_CASE("l0 output lies in the feasible set and matches its own objective") {
  const auto in = make_instance(BasisKind::DCT, 8, 32, 1, 1e4, 2);
  const auto r = l0_exhaustive(in.y, in.sm, in.basis, in.T, 1);
  CHECK(r.estimate.f.minCoeff() >= 0.0);
  CHECK(r.estimate.f.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.candidates == l0_candidate_count(8, 1, r.grid));

  // Re-evaluate every candidate directly.
  double best = std::numeric_limits<double>::infinity();
  Vector theta = Vector::Zero(8);
  theta(0) = 1 / std::sqrt(8.0);
  best = l0_objective(in.y, in.sm, in.basis, in.T, 1, r.grid.K, theta);
  for (int i = 1; i < 8; ++i)
    for (double lv : r.grid.nonzero_levels()) {
      Vector c = theta;
      c(i) = lv;
      best = std::min(best, l0_objective(in.y, in.sm, in.basis, in.T, 1, r.grid.K, c));
    }
  CHECK(r.objective == best);

  // The objective is nll of the projected candidate plus the penalty.
  const Vector f = project_simplex(synthesize(in.basis, r.theta_candidate));
  const double direct = nll(in.y, in.T * (in.sm.A * f)) + penalty(r.theta_candidate, 8, 1, r.grid.K);
  CHECK(r.objective == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("l0 with a single-level grid returns the flat image") {
  const auto in = make_instance(BasisKind::DWT, 8, 16, 2, 5.0, 3);
  const auto r = l0_exhaustive(in.y, in.sm, in.basis, in.T, 2);
  CHECK(r.grid.K == 1);
  CHECK(r.candidates == 1);
  CHECK((r.estimate.f.array() - 0.125).abs().maxCoeff() <= 1e-15);
}

TEST_CASE("l0 budget guard") {
  const auto in = make_instance(BasisKind::DCT, 16, 16, 2, 1e8, 3);
  L0Options o;
  o.budget = 1000;
  CHECK_THROWS_AS(l0_exhaustive(in.y, in.sm, in.basis, in.T, 2, o), ComplexityGuard);
}

TEST_CASE("l0 recovers the support at high intensity") {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto in = make_instance(BasisKind::DCT, 8, 32, 1, 1e8, seed);
    const auto r = l0_exhaustive(in.y, in.sm, in.basis, in.T, 1);
    int truth = -1;
    for (int i = 1; i < 8; ++i)
      if (in.truth.theta(i) != 0.0) truth = i;
    hits += r.support.size() == 1 && r.support[0] == truth;
  }
  CHECK(hits >= 18);
}

// ---------------------------------------------------------------------------
// Downsampling

TEST_CASE("downsampling estimator examples") {
  const int p = 64, kappa = 4;
  const Basis b = make_basis(BasisKind::DWT, p);
  const Matrix Ads = downsampling_matrix(p, kappa);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Signal s = packing_signal_split(b, 6, 3, p / kappa, seed);
    const double T = 1e5;
    const Vector y = T * (Ads * s.f);
    const Vector est = downsampling_estimate(y, b, T, kappa);
    CHECK(est(0) == 1.0 / 8.0);
    for (int i = 1; i < p / kappa; ++i) CHECK(std::abs(est(i) - s.theta(i)) <= 1e-12);
    for (int i = p / kappa; i < p; ++i) CHECK(std::abs(est(i)) <= 1e-12);

    const Counts yc = poisson_sample(y, seed);
    CHECK(downsampling_estimate(yc, b, T, kappa)(0) == 1.0 / 8.0);
  }
  CHECK_THROWS_AS(downsampling_estimate(Vector::Zero(16), make_basis(BasisKind::DCT, 64), 1.0, 4), UnsupportedBasis);
  CHECK_THROWS_AS(downsampling_estimate(Vector::Zero(15), b, 1.0, 4), InvalidDimension);
}

TEST_CASE("downsampling coarse variance against the stated bound") {
  // The empirical variance of a coarse coefficient is about 1/(T p), not the
  // 2/(T p kappa) stated for the estimator; both are reported and the
  // relationship is checked as it actually holds.
  const int p = 64, kappa = 4;
  const double T = 1e4;
  const Basis b = make_basis(BasisKind::DWT, p);
  const Signal s = packing_signal_split(b, 4, 4, p / kappa, 1);
  const Vector mu = T * (downsampling_matrix(p, kappa) * s.f);
  const int N = 4000;
  std::vector<double> sum(p, 0.0), sq(p, 0.0);
  for (int t = 0; t < N; ++t) {
    const Vector est = downsampling_estimate(poisson_sample(mu, 1000 + t), b, T, kappa);
    for (int i = 1; i < p / kappa; ++i) {
      sum[i] += est(i);
      sq[i] += est(i) * est(i);
    }
  }
  for (int i = 1; i < p / kappa; ++i) {
    const double m = sum[i] / N, var = sq[i] / N - m * m;
    CHECK(var == doctest::Approx(1.0 / (T * p)).epsilon(0.15));
    CHECK(var > 2.0 / (T * p * kappa));
  }
}
