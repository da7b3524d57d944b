#pragma once

#include "pcs/common.hpp"

#include <cstdint>
#include <string_view>

namespace pcs {

enum class BasisKind { DCT, DHT, DWT };

BasisKind parse_basis_kind(std::string_view name);
std::string_view to_string(BasisKind kind);

/// Orthonormal p x p sparsifying dictionary whose first column is the
/// constant vector p^{-1/2}. Immutable once built.
struct Basis {
  BasisKind kind;
  int p;
  Matrix D;
  double L;  // max |D_jk|

  auto Dbar() const { return D.rightCols(p - 1); }
};

/// DCT-II (any p >= 2), Hadamard in natural (bitwise dot product) order, or
/// the orthonormal Haar synthesis matrix ordered DC, then coarse to fine,
/// left to right within a scale. DHT and DWT need p a power of two.
Basis make_basis(BasisKind kind, int p);

Vector synthesize(const Basis& basis, const Vector& theta);
Vector analyze(const Basis& basis, const Vector& f);

bool is_power_of_two(std::uint64_t p);

enum class LambdaForm {
  Exact,            // DCT: sqrt(2) k / sqrt(p), an upper bound; DHT: k/sqrt(p); DWT: geometric sum over min(k, m) scales
  Table1,           // sqrt(2) k / sqrt(p) for DCT and DHT, 1/(sqrt(2)-1) for DWT
  TruncatedScales,  // as Exact, but DWT truncates at m' = min(k, m - 1)
};

/// Closed-form k-sparse localization of the non-DC columns.
double lambda_closed(BasisKind kind, std::uint64_t p, int k, LambdaForm form = LambdaForm::Exact);

struct LambdaBruteOptions {
  double budget = 1e7;  // max evaluated sign vectors, C(p-1, k) * 2^k
  Exec exec = Exec::Parallel;
};

/// max ||Dbar v||_inf over v in {-1,0,1}^{p-1} with exactly k nonzeros, by
/// exhaustive enumeration.
double lambda_brute(const Basis& basis, int k, const LambdaBruteOptions& opts = {});

}  // namespace pcs
