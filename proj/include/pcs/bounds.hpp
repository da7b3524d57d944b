#pragma once

#include "pcs/bases.hpp"

#include <span>

namespace pcs {

struct BoundConfig {
  double C_L = 1.0;
  double C_U = 1.0;
  double a_u = 1.0;
  double a_l = -1.0;
  double delta = 0.0;
  bool include_logT_term = false;
  /// Use the constants obtained in the lower-bound proof (1/32 and
  /// (a_u - a_l)^2 / (512 (1 + delta))) in place of C_L.
  bool proof_constants = false;
};

/// True when p >= 10 and 1 <= s < p/3 - 1; outside that range the lower bound
/// is still evaluated but carries no guarantee.
bool minimax_lower_hypotheses(int p, int s);

/// C_L max_k min( k / (p^2 lambda_k^2), (k / T) log((p - k - 1) / (k / 2)) ).
double minimax_lower(int p, int s, double T, std::span<const double> lambdas, const BoundConfig& cfg = {});

/// C_U min( s log2 p / ((1-delta) T) [+ s log2(T+1) / ((1-delta) T)], s L^2, 1 ).
double minimax_upper(int p, int s, double T, double L, const BoundConfig& cfg = {});

struct Table1Bounds {
  double lower;
  double upper;
};

/// Per-basis bounds with constants dropped.
Table1Bounds table1_bounds(BasisKind kind, int p, int s, double T);

/// 2 s' / (T p kappa) + (s - s') / (lambda^2 p^2).
double ds_upper(int p, int s, int s_prime, double T, int kappa, double lambda);

struct LowIntensityFloor {
  bool applies;
  double floor;  // 1/8
};

/// Haar basis, s >= log2 p, T <= (a_u - a_l)^2 ln p / (4 (1 + delta)).
LowIntensityFloor haar_low_intensity_floor(int p, int s, double T, const BoundConfig& cfg = {});

/// lambda_1 .. lambda_s from lambda_closed (Exact form).
std::vector<double> closed_lambdas(BasisKind kind, int p, int s);

}  // namespace pcs
