#pragma once

#include "pcs/bases.hpp"
#include "pcs/common.hpp"

#include <filesystem>

namespace pcs {

/// Physically constrained sensing pair: A = (A_tilde + shift) / rescale with
/// entries of A_tilde in [a_l, a_u] / sqrt(n) and entries of A in [1/(2n), 1/n].
struct SensingMatrix {
  int n = 0;
  int p = 0;
  Matrix A;
  Matrix A_tilde;
  double a_l = -1.0;
  double a_u = 1.0;
  double shift = 0.0;
  double rescale = 1.0;
  std::uint64_t seed = 0;
};

struct AffineMap {
  double shift;    // (a_u - 2 a_l) / sqrt(n)
  double rescale;  // 2 sqrt(n) (a_u - a_l)
};

/// Shift and rescale that carry [a_l, a_u]/sqrt(n) onto [1/(2n), 1/n].
AffineMap flux_affine_map(int n, double a_l, double a_u);

/// A_tilde i.i.d. uniform on {-1/sqrt(n), +1/sqrt(n)}; deterministic in seed.
SensingMatrix bernoulli_sensing(int n, int p, std::uint64_t seed);

/// Wrap an arbitrary bounded A_tilde (entries must lie in [a_l, a_u]/sqrt(n)).
SensingMatrix sensing_from_tilde(const Matrix& A_tilde, double a_l, double a_u);

struct NegativeEntry {
  int row, col;
  double value;
};
struct ColumnSumViolation {
  int col;
  double sum;
};
struct PhysicalReport {
  std::vector<NegativeEntry> negative;
  std::vector<ColumnSumViolation> column_sums;
  bool pass() const { return negative.empty() && column_sums.empty(); }
};

/// Nonnegativity and column sums <= 1 (within 1e-12).
PhysicalReport validate_physical(const Matrix& A);

/// Block-sum matrix I_{p/kappa} (x) 1_{1 x kappa}.
Matrix downsampling_matrix(int p, int kappa);

struct RipOptions {
  double budget = 1e6;  // max supports enumerated exhaustively
  bool sample = false;  // when over budget, sample supports instead of failing
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  Exec exec = Exec::Parallel;
};

struct RipEstimate {
  int s = 0;
  double delta_hat = 0.0;
  std::uint64_t supports_checked = 0;
  bool sampled = false;  // true: a lower estimate from sampled supports
};

/// Max over 2s-column supports of max(sigma_max^2 - 1, 1 - sigma_min^2) for
/// the corresponding submatrix of A_tilde D.
RipEstimate estimate_rip(const SensingMatrix& sm, const Basis& basis, int s, const RipOptions& opts = {});

/// Same computation on an explicit n x p matrix (the product A_tilde D).
RipEstimate estimate_rip(const Matrix& Psi, int s, const RipOptions& opts = {});

/// Binary dump: int64 n, int64 p, then n*p little-endian float64, row-major.
void write_matrix_binary(const std::filesystem::path& path, const Matrix& A);
Matrix read_matrix_binary(const std::filesystem::path& path);

}  // namespace pcs
