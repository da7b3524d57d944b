#pragma once

#include "pcs/bases.hpp"

#include <optional>

namespace pcs {

struct MembershipReport {
  bool dc_ok = false;          // theta_1 == p^{-1/2} (within 1e-12)
  bool sparsity_ok = false;    // ||theta_bar||_0 <= s
  bool nonnegative_ok = false; // min f >= -1e-12
  bool unit_mass_ok = false;   // | ||f||_1 - 1 | <= 1e-10
  int nonzeros = 0;
  double min_pixel = 0.0;
  double l1_norm = 0.0;
  bool pass() const { return dc_ok && sparsity_ok && nonnegative_ok && unit_mass_ok; }
};

/// A candidate member of the class of nonnegative, unit-mass signals that are
/// s-sparse in the non-DC part of a basis.
struct Signal {
  Vector theta;
  Vector f;
  int s = 0;
  BasisKind basis_kind = BasisKind::DCT;
  MembershipReport membership;

  double theta_bar_energy() const { return theta.tail(theta.size() - 1).squaredNorm(); }
};

MembershipReport validate_class_membership(const Basis& basis, const Vector& theta, int s);

struct PackingSpec {
  int k;
  double alpha;   // 1 / (p lambda_k)
  double eta_sq;  // k alpha^2 / 2
};

PackingSpec packing_spec(int p, int k, double lambda_k);

/// Packing element: k random distinct non-DC positions with random signs and
/// amplitude 1/(p lambda_k). lambda_k defaults to lambda_closed (Exact form),
/// which equals or upper-bounds the brute-force value for every basis.
Signal packing_signal(const Basis& basis, int k, std::uint64_t seed, std::optional<double> lambda_k = {});

/// Packing element with s_prime nonzeros drawn from the coarse coefficients
/// (0-based indices 1 .. coarse_end-1) and s - s_prime from the rest.
Signal packing_signal_split(const Basis& basis, int s, int s_prime, int coarse_end, std::uint64_t seed,
                            std::optional<double> lambda_s = {});

/// DCT coefficients decaying linearly: theta_j = (s - j + 2) / (s sqrt(p)), j = 2..s+1.
Signal triangular_signal(const Basis& dct, int s);
Signal triangular_signal(int p, int s);

/// Haar analysis of a unit spike at 1-based `position` when s >= log2 p;
/// for smaller s, the s coarsest non-DC coefficients of the spike at pixel 1.
Signal delta_like_dwt_signal(const Basis& dwt, int s, int position);
Signal delta_like_dwt_signal(int p, int s, int position);

}  // namespace pcs
