#include "pcs/estimators.hpp"
#include "pcs/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pcs {

PoissonProblem::PoissonProblem(Counts y, const Matrix& A, const Basis& basis, double T)
    : y_(std::move(y)), T_(T), offset_(0.0), p_(basis.p) {
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("Poisson problem needs a finite T > 0");
  if (A.cols() != basis.p) throw InvalidDimension("sensing matrix columns != basis dimension");
  if (static_cast<Eigen::Index>(y_.size()) != A.rows()) throw InvalidDimension("counts length != sensing rows");
  const Matrix Phi = T * (A * basis.D);
  base_ = Phi.col(0) * (1.0 / std::sqrt(static_cast<double>(p_)));
  Phi_bar_ = Phi.rightCols(p_ - 1);
  yd_.resize(y_.size());
  for (std::size_t i = 0; i < y_.size(); ++i) {
    if (y_[i] < 0) throw DomainError("negative count");
    yd_(i) = static_cast<double>(y_[i]);
    if (y_[i] > 0) offset_ += yd_(i) - yd_(i) * std::log(yd_(i));
  }
}

Vector PoissonProblem::mean(const Vector& theta_bar) const {
  Vector mu = base_;
  for (Eigen::Index j = 0; j < theta_bar.size(); ++j)
    if (theta_bar(j) != 0.0) mu.noalias() += theta_bar(j) * Phi_bar_.col(j);
  return mu;
}

double PoissonProblem::smooth(const Vector& theta_bar, Vector* mu_out) const {
  Vector mu = mean(theta_bar);
  double total = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const double m = mu(i), yi = yd_(i);
    if (!(m > 0.0)) {
      total = std::numeric_limits<double>::infinity();
      break;
    }
    if (yi == 0.0) {
      total += m;
    } else {
      const double r = (m - yi) / yi;
      total += yi * (r - std::log1p(r));
    }
  }
  if (mu_out) *mu_out = std::move(mu);
  return total;
}

Vector PoissonProblem::gradient(const Vector& mu) const {
  const Vector w = (1.0 - yd_.array() / mu.array()).matrix();
  return Phi_bar_.transpose() * w;
}

double PoissonProblem::tau_max() const {
  return gradient(base_).cwiseAbs().maxCoeff();
}

namespace {

Vector soft_threshold(const Vector& z, double t) {
  return (z.array().sign() * (z.array().abs() - t).max(0.0)).matrix();
}

double l1(const Vector& v) { return v.cwiseAbs().sum(); }

// Curvature of the smooth part along direction d at mean mu: d^T H d with
// H = Phi_bar^T diag(y / mu^2) Phi_bar.
double directional_curvature(const PoissonProblem& problem, const Vector& mu, const Vector& d) {
  const Vector zero = Vector::Zero(d.size());
  const Vector v = problem.mean(d) - problem.mean(zero);
  double c = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    c += static_cast<double>(problem.y()[i]) * v(i) * v(i) / (mu(i) * mu(i));
  return c;
}

}  // namespace

SpiralResult spiral_solve(const PoissonProblem& problem, const Basis& basis, const SolverOptions& opts,
                          const Vector* warm_start) {
  if (!(opts.tau >= 0.0)) throw InvalidArgument("spiral: tau must be nonnegative");
  if (!(opts.rel_tol > 0.0)) throw InvalidArgument("spiral: rel_tol must be positive");
  if (!(opts.backtrack_factor > 0.0 && opts.backtrack_factor < 1.0))
    throw InvalidArgument("spiral: backtrack_factor must lie in (0, 1)");
  const int p = basis.p;
  const double dc = 1.0 / std::sqrt(static_cast<double>(p));
  const double tau = opts.tau;
  constexpr double alpha_min = 1e-30, alpha_max = 1e30;

  SpiralResult result;
  result.tau = tau;
  auto& trace = result.trace;

  Vector x = warm_start ? *warm_start : Vector::Zero(p - 1);
  if (x.size() != p - 1) throw InvalidDimension("spiral: warm start has wrong length");
  Vector mu;
  double h = problem.smooth(x, &mu);
  if (!std::isfinite(h) && warm_start) {
    x.setZero();
    h = problem.smooth(x, &mu);
  }
  double phi = h + tau * l1(x);
  if (!std::isfinite(phi)) throw SolverDivergence("spiral: objective not finite at the starting point", {});
  trace.objective.push_back(phi + problem.nll_offset());
  Vector g = problem.gradient(mu);

  double alpha = 1.0;
  if (opts.step_init_bb) {
    const double gg = g.squaredNorm();
    if (gg > 0.0) alpha = directional_curvature(problem, mu, g) / gg;
    if (!(alpha > alpha_min)) alpha = 1.0;
  }

  const auto to_feasible = [&](Vector cand) {
    if (opts.nonneg == NonnegMode::PostHoc) return cand;
    Vector theta(p);
    theta(0) = dc;
    theta.tail(p - 1) = cand;
    const Vector proj = analyze(basis, project_simplex(synthesize(basis, theta)));
    return Vector(proj.tail(p - 1));
  };

  Vector x_new, mu_new;
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    bool accepted = false;
    double phi_new = 0.0;
    while (alpha <= alpha_max) {
      x_new = to_feasible(soft_threshold(x - g / alpha, tau / alpha));
      const double h_new = problem.smooth(x_new, &mu_new);
      if (std::isnan(h_new)) throw SolverDivergence("spiral: objective became NaN", trace.objective);
      phi_new = h_new + tau * l1(x_new);
      const double decrease = 0.5 * opts.sufficient_decrease * alpha * (x_new - x).squaredNorm();
      if (std::isfinite(phi_new) && phi_new <= phi - decrease) {
        accepted = true;
        break;
      }
      ++trace.rejected_steps;
      alpha /= opts.backtrack_factor;
    }
    if (!accepted) {
      // No step decreases the objective at working precision: stationary.
      trace.converged = true;
      break;
    }
    const Vector dx = x_new - x;
    const Vector g_new = problem.gradient(mu_new);
    trace.iterations = iter + 1;
    trace.objective.push_back(phi_new + problem.nll_offset());

    const double step_norm = dx.norm();
    const double x_norm = std::sqrt(dc * dc + x_new.squaredNorm());
    x.swap(x_new);
    mu.swap(mu_new);
    phi = phi_new;

    if (step_norm <= opts.rel_tol * x_norm) {
      trace.converged = true;
      g = g_new;
      break;
    }
    if (opts.step_init_bb) {
      const double curv = dx.dot(g_new - g);
      const double dd = dx.squaredNorm();
      alpha = (curv > 0.0 && dd > 0.0) ? std::clamp(curv / dd, alpha_min, alpha_max) : alpha;
    }
    g = g_new;
  }

  trace.theta_raw.resize(p);
  trace.theta_raw(0) = dc;
  trace.theta_raw.tail(p - 1) = x;

  const Vector raw = synthesize(basis, trace.theta_raw);
  Vector f = raw.cwiseMax(0.0);
  f /= f.sum();
  Signal& est = result.estimate;
  est.basis_kind = basis.kind;
  est.f = f;
  // Without clipping the iterate is already feasible; keep its exact zeros.
  est.theta = raw.minCoeff() >= 0.0 ? trace.theta_raw : analyze(basis, f);
  est.s = static_cast<int>((x.array() != 0.0).count());
  est.membership = validate_class_membership(basis, est.theta, p - 1);
  return result;
}

SpiralResult spiral_estimate(const Counts& y, const SensingMatrix& sm, const Basis& basis, double T,
                             const SolverOptions& opts) {
  PoissonProblem problem(y, sm.A, basis, T);
  if (std::isinf(opts.tau)) {
    // Infinite weight: every non-DC coefficient is thresholded away.
    SolverOptions capped = opts;
    capped.tau = std::numeric_limits<double>::max();
    return spiral_solve(problem, basis, capped);
  }
  return spiral_solve(problem, basis, opts);
}

std::vector<double> auto_tau_grid(const PoissonProblem& problem, int count, double ratio) {
  if (count < 1) throw InvalidArgument("auto_tau_grid: count must be positive");
  const double top = problem.tau_max();
  std::vector<double> taus(count);
  for (int i = 0; i < count; ++i)
    taus[i] = count == 1 ? top : top * std::pow(ratio, static_cast<double>(i) / (count - 1));
  return taus;
}

OracleResult spiral_oracle(const PoissonProblem& problem, const Basis& basis, std::vector<double> taus,
                           const SolverOptions& opts, const Vector& f_true) {
  if (taus.empty()) throw InvalidArgument("spiral_oracle: empty tau grid");
  std::sort(taus.begin(), taus.end(), std::greater<>());
  OracleResult out;
  out.taus = taus;
  Vector warm = Vector::Zero(basis.p - 1);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < taus.size(); ++i) {
    SolverOptions o = opts;
    o.tau = std::isinf(taus[i]) ? std::numeric_limits<double>::max() : taus[i];
    SpiralResult r = spiral_solve(problem, basis, o, &warm);
    warm = r.trace.theta_raw.tail(basis.p - 1);
    const double err = (r.estimate.f - f_true).squaredNorm();
    out.mse.push_back(err);
    if (err < best) {
      best = err;
      out.best_index = static_cast<int>(i);
      out.best = std::move(r);
    }
  }
  out.best.tau = taus[out.best_index];
  return out;
}

}  // namespace pcs
