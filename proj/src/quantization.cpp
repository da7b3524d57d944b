#include "pcs/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pcs {

std::vector<double> QuantizationGrid::nonzero_levels() const {
  std::vector<double> out;
  for (double v : levels)
    if (v != 0.0) out.push_back(v);
  return out;
}

double quantization_k_star(double T, double L, double delta, double a_u, double a_l) {
  if (!(a_u > a_l)) throw InvalidArgument("quantization_level: need a_u > a_l");
  if (!(T >= 0.0)) throw InvalidArgument("quantization_level: need T >= 0");
  const double span = a_u - a_l;
  return std::sqrt((1.0 + delta) * L * L * T * std::numbers::ln2 / (2.0 * span * span));
}

QuantizationGrid make_grid(int K, double L) {
  if (K < 1) throw InvalidArgument("quantization grid needs K >= 1");
  QuantizationGrid g;
  g.K = K;
  g.L = L;
  if (K == 1) {
    g.levels = {0.0};
    return g;
  }
  g.levels.resize(K);
  // L (2i - (K-1)) / (K-1): exactly antisymmetric, exact zero at the middle for odd K.
  for (int i = 0; i < K; ++i) g.levels[i] = L * ((2.0 * i - (K - 1)) / (K - 1));
  return g;
}

QuantizationGrid quantization_level(double T, double L, double delta, double a_u, double a_l) {
  const double kstar = quantization_k_star(T, L, delta, a_u, a_l);
  const double nearest = std::round(kstar);
  const double snapped = std::abs(kstar - nearest) <= 1e-9 * std::max(1.0, kstar) ? nearest : kstar;
  const double K = std::max(1.0, std::ceil(snapped));
  if (K > 1e9) throw InvalidArgument("quantization_level: K* too large for an explicit grid");
  return make_grid(static_cast<int>(K), L);
}

Quantized quantize(const Vector& theta, const QuantizationGrid& grid) {
  Quantized q;
  q.theta = theta;
  const auto& lv = grid.levels;
  for (Eigen::Index i = 1; i < theta.size(); ++i) {
    double v = theta(i);
    if (v == 0.0) continue;
    if (std::abs(v) > grid.L) {
      q.clamped = true;
      v = std::copysign(grid.L, v);
    }
    // Nearest level; on an exact tie prefer the level of smaller magnitude.
    auto hi = std::lower_bound(lv.begin(), lv.end(), v);
    double best;
    if (hi == lv.begin()) {
      best = *hi;
    } else if (hi == lv.end()) {
      best = lv.back();
    } else {
      const double a = *(hi - 1), b = *hi;
      const double da = v - a, db = b - v;
      if (da < db)
        best = a;
      else if (db < da)
        best = b;
      else
        best = std::abs(a) <= std::abs(b) ? a : b;
    }
    q.theta(i) = best;
    q.max_error = std::max(q.max_error, std::abs(theta(i) - best));
  }
  return q;
}

double penalty_for_count(int nonzeros, int p, int s, int K) {
  return 2.0 * std::log2(static_cast<double>(s)) + 2.0 * nonzeros * std::log2(static_cast<double>(p) * K);
}

double penalty(const Vector& theta, int p, int s, int K) {
  int nnz = 0;
  for (Eigen::Index i = 1; i < theta.size(); ++i)
    if (theta(i) != 0.0) ++nnz;
  return penalty_for_count(nnz, p, s, K);
}

double kraft_sum(int p, int s, int K) {
  const auto nz = make_grid(K, 1.0).nonzero_levels();
  const int levels = static_cast<int>(nz.size());
  double sum = 0.0;
  for (int j = 0; j <= s && j <= p - 1; ++j) {
    if (j > 0 && levels == 0) break;
    const double term = std::exp(-0.5 * penalty_for_count(j, p, s, K));
    std::vector<int> c(j);
    for (int i = 0; i < j; ++i) c[i] = i;
    std::uint64_t tuples = 1;
    for (int i = 0; i < j; ++i) tuples *= levels;
    do {
      for (std::uint64_t code = 0; code < tuples; ++code) sum += term;
    } while (j > 0 && next_combination(c, p - 1));
  }
  return sum;
}

Vector project_simplex(const Vector& f) {
  const Eigen::Index p = f.size();
  if (p == 0) throw InvalidDimension("project_simplex: empty vector");
  std::vector<double> u(f.data(), f.data() + p);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0, shift = 0.0;
  for (Eigen::Index j = 0; j < p; ++j) {
    cumsum += u[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) shift = t;
  }
  return (f.array() - shift).max(0.0).matrix();
}

}  // namespace pcs
