#pragma once

#include "pcs/common.hpp"

namespace pcs {

/// Independent Poisson draws, one counter-based substream per coordinate, so
/// the result depends only on (mu, seed). Zero means give exactly zero.
Counts poisson_sample(const Vector& mu, std::uint64_t seed);

/// Single draw from a stream (inversion below mean 10, PTRS above).
std::int64_t poisson_draw(double mean, CounterStream& rng);

/// sum_i (mu_i - y_i log mu_i); the log y! constant is dropped.
double nll(const Counts& y, const Vector& mu);

/// d nll / d mu = 1 - y / mu.
Vector nll_gradient(const Counts& y, const Vector& mu);

/// nll(y, mu) - nll(y, y) evaluated term by term without cancellation:
/// sum_i mu_i - y_i - y_i log(mu_i / y_i). Nonnegative; zero at mu = y.
double poisson_deviance_half(const Counts& y, const Vector& mu);

/// KL( Poisson(mu1) || Poisson(mu2) ) for vector means.
double poisson_kl(const Vector& mu1, const Vector& mu2);

/// log(k!) without touching global state (safe inside parallel regions).
double log_factorial(std::int64_t k);

}  // namespace pcs
