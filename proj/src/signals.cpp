#include "pcs/signals.hpp"

#include <bit>
#include <cmath>

namespace pcs {

MembershipReport validate_class_membership(const Basis& basis, const Vector& theta, int s) {
  if (theta.size() != basis.p) throw InvalidDimension("validate_class_membership: theta length != p");
  MembershipReport r;
  const double dc = 1.0 / std::sqrt(static_cast<double>(basis.p));
  r.dc_ok = std::abs(theta(0) - dc) <= 1e-12;
  for (Eigen::Index i = 1; i < theta.size(); ++i)
    if (theta(i) != 0.0) ++r.nonzeros;
  r.sparsity_ok = r.nonzeros <= s;
  const Vector f = synthesize(basis, theta);
  r.min_pixel = f.minCoeff();
  r.l1_norm = f.cwiseAbs().sum();
  r.nonnegative_ok = r.min_pixel >= -1e-12;
  r.unit_mass_ok = std::abs(r.l1_norm - 1.0) <= 1e-10;
  return r;
}

PackingSpec packing_spec(int p, int k, double lambda_k) {
  if (!(lambda_k > 0.0)) throw InvalidArgument("packing_spec: lambda must be positive");
  const double alpha = 1.0 / (p * lambda_k);
  return {k, alpha, 0.5 * k * alpha * alpha};
}

namespace {

Signal finish(const Basis& basis, Vector theta, int s) {
  Signal sig;
  sig.f = synthesize(basis, theta);
  sig.theta = std::move(theta);
  sig.s = s;
  sig.basis_kind = basis.kind;
  sig.membership = validate_class_membership(basis, sig.theta, s);
  return sig;
}

Vector dc_only(int p) {
  Vector theta = Vector::Zero(p);
  theta(0) = 1.0 / std::sqrt(static_cast<double>(p));
  return theta;
}

// Choose `count` distinct indices from [lo, hi) uniformly (partial Fisher-Yates).
void choose_positions(CounterStream& rng, int lo, int hi, int count, std::vector<int>& out) {
  std::vector<int> pool(hi - lo);
  for (int i = 0; i < hi - lo; ++i) pool[i] = lo + i;
  for (int i = 0; i < count; ++i) {
    std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
    out.push_back(pool[i]);
  }
}

}  // namespace

Signal packing_signal(const Basis& basis, int k, std::uint64_t seed, std::optional<double> lambda_k) {
  if (k < 1 || k > basis.p - 1) throw InvalidArgument("packing_signal: k must lie in [1, p-1]");
  const double lam = lambda_k ? *lambda_k : lambda_closed(basis.kind, basis.p, k);
  const auto spec = packing_spec(basis.p, k, lam);
  CounterStream rng(seed, 0x9AC);
  std::vector<int> pos;
  choose_positions(rng, 1, basis.p, k, pos);
  Vector theta = dc_only(basis.p);
  for (int j : pos) theta(j) = (rng.next_u64() >> 63) ? -spec.alpha : spec.alpha;
  return finish(basis, std::move(theta), k);
}

Signal packing_signal_split(const Basis& basis, int s, int s_prime, int coarse_end, std::uint64_t seed,
                            std::optional<double> lambda_s) {
  if (s < 1 || s > basis.p - 1) throw InvalidArgument("packing_signal_split: s must lie in [1, p-1]");
  if (s_prime < 0 || s_prime > s) throw InvalidArgument("packing_signal_split: need 0 <= s' <= s");
  if (coarse_end < 1 || coarse_end > basis.p || s_prime > coarse_end - 1 || s - s_prime > basis.p - coarse_end)
    throw InvalidArgument("packing_signal_split: not enough coarse or fine positions");
  const double lam = lambda_s ? *lambda_s : lambda_closed(basis.kind, basis.p, s);
  const auto spec = packing_spec(basis.p, s, lam);
  CounterStream rng(seed, 0x9AC);
  std::vector<int> pos;
  choose_positions(rng, 1, coarse_end, s_prime, pos);
  choose_positions(rng, coarse_end, basis.p, s - s_prime, pos);
  Vector theta = dc_only(basis.p);
  for (int j : pos) theta(j) = (rng.next_u64() >> 63) ? -spec.alpha : spec.alpha;
  return finish(basis, std::move(theta), s);
}

Signal triangular_signal(const Basis& dct, int s) {
  if (dct.kind != BasisKind::DCT) throw UnsupportedBasis("triangular_signal is defined in the DCT basis");
  const int p = dct.p;
  if (s < 0 || s + 1 > p) throw InvalidArgument("triangular_signal: need s + 1 <= p");
  Vector theta = dc_only(p);
  const double sp = std::sqrt(static_cast<double>(p));
  // 1-based j = 2..s+1  <->  0-based i = 1..s, value (s - i + 1) / (s sqrt p)
  for (int i = 1; i <= s; ++i) theta(i) = (s - i + 1) / (s * sp);
  return finish(dct, std::move(theta), s);
}

Signal triangular_signal(int p, int s) { return triangular_signal(make_basis(BasisKind::DCT, p), s); }

Signal delta_like_dwt_signal(const Basis& dwt, int s, int position) {
  if (dwt.kind != BasisKind::DWT) throw UnsupportedBasis("delta_like_dwt_signal is defined in the Haar basis");
  const int p = dwt.p;
  if (position < 1 || position > p) throw InvalidArgument("delta_like_dwt_signal: position out of range");
  const int m = std::countr_zero(static_cast<unsigned>(p));
  if (s >= m) {
    Vector spike = Vector::Zero(p);
    spike(position - 1) = 1.0;
    return finish(dwt, analyze(dwt, spike), s);
  }
  if (position != 1)
    throw InvalidArgument("delta_like_dwt_signal: truncation below log2(p) scales only supports position 1");
  Vector theta = dc_only(p);
  const double sp = std::sqrt(static_cast<double>(p));
  for (int k = 0; k < s; ++k) theta(1 << k) = std::exp2(0.5 * k) / sp;
  return finish(dwt, std::move(theta), s);
}

Signal delta_like_dwt_signal(int p, int s, int position) {
  return delta_like_dwt_signal(make_basis(BasisKind::DWT, p), s, position);
}

}  // namespace pcs
