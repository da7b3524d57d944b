#include "pcs/poisson.hpp"

#include <array>
#include <cmath>

namespace pcs {

double log_factorial(std::int64_t k) {
  static const std::array<double, 11> table = [] {
    std::array<double, 11> t{};
    for (int i = 1; i < 11; ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
    return t;
  }();
  if (k < 0) throw DomainError("log_factorial of a negative integer");
  if (k < 11) return table[k];
  // Stirling series for log Gamma(x), x = k + 1 >= 12.
  const double x = static_cast<double>(k) + 1.0;
  const double x2 = 1.0 / (x * x);
  const double series =
      (1.0 / 12.0 - x2 * (1.0 / 360.0 - x2 * (1.0 / 1260.0 - x2 * (1.0 / 1680.0 - x2 / 1188.0)))) / x;
  return (x - 0.5) * std::log(x) - x + 0.91893853320467274178 + series;
}

namespace {

std::int64_t draw_inversion(double mean, CounterStream& rng) {
  const double u = rng.uniform();
  double prob = std::exp(-mean);
  double cdf = prob;
  std::int64_t k = 0;
  while (u > cdf) {
    ++k;
    prob *= mean / static_cast<double>(k);
    cdf += prob;
    if (prob < 1e-300 && k > mean) break;  // tail exhausted in double precision
  }
  return k;
}

// Transformed rejection with squeeze (Hormann, 1993).
std::int64_t draw_ptrs(double mean, CounterStream& rng) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double U = rng.uniform() - 0.5;
    const double V = rng.uniform();
    const double us = 0.5 - std::abs(U);
    const double kd = std::floor((2.0 * a / us + b) * U + mean + 0.43);
    if (us >= 0.07 && V <= vr) return static_cast<std::int64_t>(kd);
    if (kd < 0.0 || (us < 0.013 && V > us)) continue;
    const auto k = static_cast<std::int64_t>(kd);
    if (std::log(V) + std::log(invalpha) - std::log(a / (us * us) + b) <= -mean + kd * loglam - log_factorial(k))
      return k;
  }
}

}  // namespace

std::int64_t poisson_draw(double mean, CounterStream& rng) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw InvalidArgument("poisson mean must be finite and nonnegative, got " + std::to_string(mean));
  if (mean == 0.0) return 0;
  return mean < 10.0 ? draw_inversion(mean, rng) : draw_ptrs(mean, rng);
}

Counts poisson_sample(const Vector& mu, std::uint64_t seed) {
  Counts y(mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    CounterStream rng(seed, static_cast<std::uint64_t>(i));
    y[i] = poisson_draw(mu(i), rng);
  }
  return y;
}

namespace {

void check_pair(const Counts& y, const Vector& mu) {
  if (static_cast<Eigen::Index>(y.size()) != mu.size()) throw InvalidDimension("counts and means differ in length");
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (!(mu(i) > 0.0)) throw DomainError("Poisson mean must be strictly positive at index " + std::to_string(i));
    if (y[i] < 0) throw DomainError("negative count at index " + std::to_string(i));
  }
}

}  // namespace

double nll(const Counts& y, const Vector& mu) {
  check_pair(y, mu);
  double total = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) total += mu(i) - static_cast<double>(y[i]) * std::log(mu(i));
  return total;
}

Vector nll_gradient(const Counts& y, const Vector& mu) {
  check_pair(y, mu);
  Vector g(mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) g(i) = 1.0 - static_cast<double>(y[i]) / mu(i);
  return g;
}

double poisson_deviance_half(const Counts& y, const Vector& mu) {
  check_pair(y, mu);
  double total = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const double yi = static_cast<double>(y[i]);
    if (yi == 0.0) {
      total += mu(i);
    } else {
      // mu = y (1 + r):  y r - y log1p(r)
      const double r = (mu(i) - yi) / yi;
      total += yi * (r - std::log1p(r));
    }
  }
  return total;
}

double poisson_kl(const Vector& mu1, const Vector& mu2) {
  if (mu1.size() != mu2.size()) throw InvalidDimension("poisson_kl: mean vectors differ in length");
  double total = 0.0;
  for (Eigen::Index i = 0; i < mu1.size(); ++i) {
    if (!(mu2(i) > 0.0)) throw DomainError("poisson_kl: second mean must be strictly positive");
    if (!(mu1(i) >= 0.0)) throw DomainError("poisson_kl: first mean must be nonnegative");
    if (mu1(i) == 0.0) {
      total += mu2(i);
    } else {
      const double r = (mu2(i) - mu1(i)) / mu1(i);  // mu2 = mu1 (1 + r)
      total += mu1(i) * (r - std::log1p(r));
    }
  }
  return total;
}

}  // namespace pcs
