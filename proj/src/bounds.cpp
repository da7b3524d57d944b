#include "pcs/bounds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace pcs {

bool minimax_lower_hypotheses(int p, int s) { return p >= 10 && s >= 1 && s < p / 3.0 - 1.0; }

double minimax_lower(int p, int s, double T, std::span<const double> lambdas, const BoundConfig& cfg) {
  if (s < 1 || static_cast<int>(lambdas.size()) < s)
    throw InvalidArgument("minimax_lower: need lambda_1 .. lambda_s");
  if (!(T > 0.0)) throw InvalidArgument("minimax_lower: T must be positive");
  const double pp = static_cast<double>(p) * p;
  const double c_low = cfg.proof_constants ? 1.0 / 32.0 : 1.0;
  const double span = cfg.a_u - cfg.a_l;
  const double c_high = cfg.proof_constants ? span * span / (512.0 * (1.0 + cfg.delta)) : 1.0;
  double best = 0.0;
  for (int k = 1; k <= s; ++k) {
    const double lam = lambdas[k - 1];
    if (!(lam > 0.0)) throw InvalidArgument("minimax_lower: lambda values must be positive");
    const double low = c_low * k / (pp * lam * lam);
    const double high = c_high * (k / T) * std::log((p - k - 1.0) / (0.5 * k));
    best = std::max(best, std::min(low, high));
  }
  return (cfg.proof_constants ? 1.0 : cfg.C_L) * best;
}

double minimax_upper(int p, int s, double T, double L, const BoundConfig& cfg) {
  if (!(cfg.delta >= 0.0 && cfg.delta < 1.0)) throw InvalidArgument("minimax_upper: delta must lie in [0, 1)");
  if (!(T > 0.0)) throw InvalidArgument("minimax_upper: T must be positive");
  const double denom = (1.0 - cfg.delta) * T;
  double rate = s * std::log2(static_cast<double>(p)) / denom;
  if (cfg.include_logT_term) rate += s * std::log2(T + 1.0) / denom;
  return cfg.C_U * std::min({rate, s * L * L, 1.0});
}

Table1Bounds table1_bounds(BasisKind kind, int p, int s, double T) {
  const double high_lower = s * std::log(static_cast<double>(p) / s) / T;
  const double high_upper = s * std::log(static_cast<double>(p)) / T;
  if (kind == BasisKind::DWT)
    return {std::min(static_cast<double>(s) / (static_cast<double>(p) * p), high_lower), std::min(1.0, high_upper)};
  return {std::min(1.0 / p, high_lower), std::min(static_cast<double>(s) / p, high_upper)};
}

double ds_upper(int p, int s, int s_prime, double T, int kappa, double lambda) {
  if (s_prime < 0 || s_prime > s) throw InvalidArgument("ds_upper: need 0 <= s' <= s");
  if (kappa < 1) throw InvalidArgument("ds_upper: kappa must be at least 1");
  if (!(lambda > 0.0)) throw InvalidArgument("ds_upper: lambda must be positive");
  const double pp = static_cast<double>(p);
  return 2.0 * s_prime / (T * pp * kappa) + (s - s_prime) / (lambda * lambda * pp * pp);
}

LowIntensityFloor haar_low_intensity_floor(int p, int s, double T, const BoundConfig& cfg) {
  const double span = cfg.a_u - cfg.a_l;
  const bool applies = p >= 4 && is_power_of_two(static_cast<std::uint64_t>(p)) &&
                       s >= std::countr_zero(static_cast<unsigned>(p)) &&
                       T <= span * span * std::log(static_cast<double>(p)) / (4.0 * (1.0 + cfg.delta));
  return {applies, 0.125};
}

std::vector<double> closed_lambdas(BasisKind kind, int p, int s) {
  std::vector<double> out;
  for (int k = 1; k <= s; ++k) out.push_back(lambda_closed(kind, static_cast<std::uint64_t>(p), k));
  return out;
}

}  // namespace pcs
