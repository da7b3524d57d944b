#pragma once

#include "pcs/bases.hpp"
#include "pcs/sensing.hpp"
#include "pcs/signals.hpp"

#include <optional>

namespace pcs {

// ---------------------------------------------------------------------------
// Quantized l0 machinery

struct QuantizationGrid {
  int K = 1;
  double L = 0.0;
  std::vector<double> levels;  // ascending, symmetric about zero, |levels| = K

  /// Levels a nonzero coefficient may take (all levels except an exact 0).
  std::vector<double> nonzero_levels() const;
};

/// K* = sqrt((1 + delta) L^2 T ln 2 / (2 (a_u - a_l)^2)).
double quantization_k_star(double T, double L, double delta, double a_u, double a_l);

/// K = max(1, ceil(K*)); a K* within 1e-9 (relative) of an integer counts as
/// that integer so that exact-arithmetic boundary cases land where expected.
QuantizationGrid quantization_level(double T, double L, double delta, double a_u, double a_l);

/// Grid {0} for K = 1, else K evenly spaced levels from -L to L.
QuantizationGrid make_grid(int K, double L);

struct Quantized {
  Vector theta;
  bool clamped = false;    // some |theta_i| exceeded L and was clamped
  double max_error = 0.0;  // max |theta_i - q_i| over i >= 2
};

/// theta_1 is kept; exact zeros stay zero (sparsity is preserved); every other
/// non-DC entry goes to the nearest level, ties toward the smaller magnitude.
Quantized quantize(const Vector& theta, const QuantizationGrid& grid);

/// 2 log2 s + 2 ||theta_bar||_0 log2(p K).
double penalty(const Vector& theta, int p, int s, int K);
double penalty_for_count(int nonzeros, int p, int s, int K);

/// sum over Theta_K of exp(-pen/2), by explicit enumeration.
double kraft_sum(int p, int s, int K);

/// Euclidean projection onto the probability simplex (sort based).
Vector project_simplex(const Vector& f);

// ---------------------------------------------------------------------------
// l1-penalized Poisson likelihood (proximal gradient)

enum class NonnegMode {
  PostHoc,    // clip and renormalize the final iterate
  Projected,  // also project each trial point's pixels onto the simplex
};

struct SolverOptions {
  double tau = 0.0;
  int max_iters = 1000;
  double rel_tol = 1e-6;
  bool step_init_bb = true;
  double backtrack_factor = 0.5;
  double sufficient_decrease = 1e-5;
  NonnegMode nonneg = NonnegMode::PostHoc;
};

struct SolverDivergence : Error {
  SolverDivergence(const std::string& what, std::vector<double> trace)
      : Error(what), objective_trace(std::move(trace)) {}
  std::vector<double> objective_trace;
};

/// Poisson likelihood for y ~ Poisson(T A D theta) as a function of the
/// non-DC coefficients; theta_1 is pinned to p^{-1/2}.
class PoissonProblem {
 public:
  PoissonProblem(Counts y, const Matrix& A, const Basis& basis, double T);

  int n() const { return static_cast<int>(Phi_bar_.rows()); }
  int p() const { return p_; }
  double T() const { return T_; }
  const Counts& y() const { return y_; }

  /// Mean vector T A D theta.
  Vector mean(const Vector& theta_bar) const;

  /// nll(y, mu) - nll(y, y); +inf when some mean is not positive.
  double smooth(const Vector& theta_bar, Vector* mu_out = nullptr) const;

  /// Gradient of smooth() in theta_bar at the given mean vector.
  Vector gradient(const Vector& mu) const;

  /// nll(y, y) = sum over y_i > 0 of y_i - y_i log y_i.
  double nll_offset() const { return offset_; }

  /// Smallest tau for which theta_bar = 0 is optimal.
  double tau_max() const;

 private:
  Counts y_;
  Vector yd_;
  Matrix Phi_bar_;  // T A Dbar
  Vector base_;     // T A d_1 / sqrt(p)
  double T_;
  double offset_;
  int p_;
};

struct SpiralTrace {
  std::vector<double> objective;  // nll + tau ||theta_bar||_1 at accepted iterates
  Vector theta_raw;               // final iterate before the nonnegativity step
  int iterations = 0;
  int rejected_steps = 0;
  bool converged = false;
};

struct SpiralResult {
  Signal estimate;
  SpiralTrace trace;
  double tau = 0.0;
};

SpiralResult spiral_solve(const PoissonProblem& problem, const Basis& basis, const SolverOptions& opts,
                          const Vector* warm_start = nullptr);

SpiralResult spiral_estimate(const Counts& y, const SensingMatrix& sm, const Basis& basis, double T,
                             const SolverOptions& opts);

/// Geometric grid from tau_max down to tau_max * ratio (descending).
std::vector<double> auto_tau_grid(const PoissonProblem& problem, int count = 30, double ratio = 1e-4);

struct OracleResult {
  SpiralResult best;
  std::vector<double> taus;  // descending as solved
  std::vector<double> mse;   // ||f_hat - f_true||^2 per tau
  int best_index = 0;
};

/// Solve along a descending tau path with warm starts and keep the estimate
/// with the smallest error against the known truth.
OracleResult spiral_oracle(const PoissonProblem& problem, const Basis& basis, std::vector<double> taus,
                           const SolverOptions& opts, const Vector& f_true);

// ---------------------------------------------------------------------------
// Exhaustive quantized l0 estimator

struct L0Options {
  double delta = 0.0;   // RIP constant entering the quantization level
  double budget = 1e6;  // max candidates
  Exec exec = Exec::Parallel;
  std::optional<int> K_override;
};

struct L0Result {
  Signal estimate;           // the Gamma element (projected pixels and their coefficients)
  Vector theta_candidate;    // the Theta_K element it came from
  std::vector<int> support;  // positions in theta_candidate of its nonzero non-DC entries (1 .. p-1)
  double objective = 0.0;    // nll(y, T A f) + pen(theta)
  std::uint64_t candidates = 0;
  std::uint64_t best_index = 0;
  QuantizationGrid grid;
};

/// Objective of one Theta_K candidate: nll(y, T A project(D theta)) + pen(theta).
double l0_objective(const Counts& y, const SensingMatrix& sm, const Basis& basis, double T, int s, int K,
                    const Vector& theta);

std::uint64_t l0_candidate_count(int p, int s, const QuantizationGrid& grid);

L0Result l0_exhaustive(const Counts& y, const SensingMatrix& sm, const Basis& basis, double T, int s,
                       const L0Options& opts = {});

// ---------------------------------------------------------------------------
// Downsampling

/// theta_1 = p^{-1/2}; the rest (1/(kappa T)) Dbar^T A_ds^T y. Haar only.
Vector downsampling_estimate(const Vector& y_ds, const Basis& basis, double T, int kappa);
Vector downsampling_estimate(const Counts& y_ds, const Basis& basis, double T, int kappa);

}  // namespace pcs
