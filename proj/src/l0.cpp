#include "pcs/estimators.hpp"
#include "pcs/poisson.hpp"

#include <cmath>
#include <limits>

#include "parallel.hpp"

namespace pcs {

std::uint64_t l0_candidate_count(int p, int s, const QuantizationGrid& grid) {
  const double levels = static_cast<double>(grid.nonzero_levels().size());
  double total = 0.0;
  for (int j = 0; j <= s && j <= p - 1; ++j) total += binomial(p - 1, j) * std::pow(levels, j);
  if (total > 1.8e19) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(total);
}

double l0_objective(const Counts& y, const SensingMatrix& sm, const Basis& basis, double T, int s, int K,
                    const Vector& theta) {
  const Vector f = project_simplex(synthesize(basis, theta));
  const Vector mu = T * (sm.A * f);
  return nll(y, mu) + penalty(theta, basis.p, s, K);
}

namespace {

struct Best {
  double value = std::numeric_limits<double>::infinity();
  std::uint64_t index = std::numeric_limits<std::uint64_t>::max();
  bool better_than(const Best& o) const { return value < o.value || (value == o.value && index < o.index); }
};

// Scores every level assignment on one support. Values are compared through
// the cancellation-free deviance form; it differs from nll by a constant.
class CandidateScorer {
 public:
  CandidateScorer(const Counts& y, const SensingMatrix& sm, const Basis& basis, double T, int s, int K,
                  const std::vector<double>& levels)
      : y_(y), A_(sm.A), basis_(basis), T_(T), s_(s), K_(K), levels_(levels),
        dc_(basis.D.col(0) / std::sqrt(static_cast<double>(basis.p))) {}

  void score_support(const std::vector<int>& support, std::uint64_t first_index, Best& best) const {
    const int j = static_cast<int>(support.size());
    const double pen = penalty_for_count(j, basis_.p, s_, K_);
    std::uint64_t tuples = 1;
    for (int t = 0; t < j; ++t) tuples *= levels_.size();
    std::vector<std::size_t> digit(j, 0);
    for (std::uint64_t code = 0; code < tuples; ++code) {
      Vector f = dc_;
      for (int t = 0; t < j; ++t) f.noalias() += levels_[digit[t]] * basis_.D.col(support[t] + 1);
      const Vector mu = T_ * (A_ * project_simplex(f));
      const Best cand{poisson_deviance_half(y_, mu) + pen, first_index + code};
      if (cand.better_than(best)) best = cand;
      // Mixed-radix increment, last support position fastest.
      for (int t = j - 1; t >= 0; --t) {
        if (++digit[t] < levels_.size()) break;
        digit[t] = 0;
      }
    }
  }

 private:
  const Counts& y_;
  const Matrix& A_;
  const Basis& basis_;
  double T_;
  int s_, K_;
  const std::vector<double>& levels_;
  Vector dc_;
};

}  // namespace

L0Result l0_exhaustive(const Counts& y, const SensingMatrix& sm, const Basis& basis, double T, int s,
                       const L0Options& opts) {
  if (sm.p != basis.p) throw InvalidDimension("l0_exhaustive: sensing matrix and basis disagree on p");
  if (static_cast<int>(y.size()) != sm.n) throw InvalidDimension("l0_exhaustive: counts length != n");
  if (s < 1) throw InvalidArgument("l0_exhaustive: s must be at least 1");
  const int p = basis.p;
  L0Result out;
  out.grid = opts.K_override ? make_grid(*opts.K_override, basis.L)
                             : quantization_level(T, basis.L, opts.delta, sm.a_u, sm.a_l);
  const auto levels = out.grid.nonzero_levels();
  const double required = static_cast<double>(l0_candidate_count(p, s, out.grid));
  if (required > opts.budget) throw ComplexityGuard("l0_exhaustive", required, opts.budget);
  out.candidates = static_cast<std::uint64_t>(required);

  const CandidateScorer scorer(y, sm, basis, T, s, out.grid.K, levels);
  Best best;
  std::uint64_t offset = 0;
  const int max_j = levels.empty() ? 0 : std::min(s, p - 1);
  for (int j = 0; j <= max_j; ++j) {
    std::uint64_t tuples = 1;
    for (int t = 0; t < j; ++t) tuples *= levels.size();
    const auto supports = static_cast<std::uint64_t>(binomial(p - 1, j));
    if (opts.exec == Exec::Serial || j == 0) {
      std::vector<int> c(j);
      for (int i = 0; i < j; ++i) c[i] = i;
      std::uint64_t r = 0;
      do {
        scorer.score_support(c, offset + r * tuples, best);
        ++r;
      } while (j > 0 && next_combination(c, p - 1));
    } else {
      std::vector<Best> partial(worker_count());
#pragma omp parallel num_threads(static_cast<int>(partial.size()))
      {
        const auto [begin, end] = detail::thread_slice(supports);
#ifdef _OPENMP
        Best& mine = partial[omp_get_thread_num()];
#else
        Best& mine = partial[0];
#endif
        if (begin < end) {
          std::vector<int> c;
          unrank_combination(begin, p - 1, j, c);
          for (std::uint64_t r = begin; r < end; ++r) {
            scorer.score_support(c, offset + r * tuples, mine);
            next_combination(c, p - 1);
          }
        }
      }
      for (const auto& b : partial)
        if (b.better_than(best)) best = b;
    }
    offset += supports * tuples;
  }

  // Decode the winning index back into (support size, support, levels).
  std::uint64_t rem = best.index;
  int j = 0;
  for (;; ++j) {
    std::uint64_t tuples = 1;
    for (int t = 0; t < j; ++t) tuples *= levels.size();
    const auto block = static_cast<std::uint64_t>(binomial(p - 1, j)) * tuples;
    if (rem < block) {
      std::vector<int> c;
      unrank_combination(rem / tuples, p - 1, j, c);
      std::uint64_t code = rem % tuples;
      Vector theta = Vector::Zero(p);
      theta(0) = 1.0 / std::sqrt(static_cast<double>(p));
      for (int t = j - 1; t >= 0; --t) {
        theta(c[t] + 1) = levels[code % levels.size()];
        code /= levels.size();
      }
      for (int& v : c) v += 1;
      out.support = c;
      out.theta_candidate = theta;
      break;
    }
    rem -= block;
  }
  out.best_index = best.index;

  const Vector f = project_simplex(synthesize(basis, out.theta_candidate));
  out.objective = l0_objective(y, sm, basis, T, s, out.grid.K, out.theta_candidate);
  out.estimate.basis_kind = basis.kind;
  out.estimate.f = f;
  out.estimate.theta = analyze(basis, f);
  out.estimate.s = j;
  out.estimate.membership = validate_class_membership(basis, out.estimate.theta, p - 1);
  return out;
}

Vector downsampling_estimate(const Vector& y_ds, const Basis& basis, double T, int kappa) {
  if (basis.kind != BasisKind::DWT)
    throw UnsupportedBasis("downsampling_estimate: coarse-scale exactness needs the Haar basis");
  if (kappa < 1 || basis.p % kappa != 0) throw InvalidArgument("downsampling_estimate: kappa must divide p");
  if (y_ds.size() != basis.p / kappa) throw InvalidDimension("downsampling_estimate: |y_ds| != p / kappa");
  if (!(T > 0.0)) throw InvalidArgument("downsampling_estimate: T must be positive");
  // A_ds^T y spreads each block count over its kappa pixels.
  Vector back(basis.p);
  for (int i = 0; i < basis.p; ++i) back(i) = y_ds(i / kappa);
  Vector theta = basis.D.transpose() * back / (kappa * T);
  theta(0) = 1.0 / std::sqrt(static_cast<double>(basis.p));
  return theta;
}

Vector downsampling_estimate(const Counts& y_ds, const Basis& basis, double T, int kappa) {
  Vector y(y_ds.size());
  for (std::size_t i = 0; i < y_ds.size(); ++i) y(i) = static_cast<double>(y_ds[i]);
  return downsampling_estimate(y, basis, T, kappa);
}

}  // namespace pcs
