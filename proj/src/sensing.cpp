#include "pcs/sensing.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "parallel.hpp"

namespace pcs {

AffineMap flux_affine_map(int n, double a_l, double a_u) {
  if (n < 1) throw InvalidDimension("sensing matrix needs n >= 1");
  if (!(a_l < a_u)) throw InvalidArgument("sensing matrix needs a_l < a_u");
  const double sn = std::sqrt(static_cast<double>(n));
  return {(a_u - 2.0 * a_l) / sn, 2.0 * sn * (a_u - a_l)};
}

SensingMatrix bernoulli_sensing(int n, int p, std::uint64_t seed) {
  if (n < 1 || p < 1) throw InvalidDimension("bernoulli_sensing needs n, p >= 1");
  SensingMatrix sm;
  sm.n = n;
  sm.p = p;
  sm.seed = seed;
  const auto map = flux_affine_map(n, sm.a_l, sm.a_u);
  sm.shift = map.shift;
  sm.rescale = map.rescale;
  sm.A_tilde.resize(n, p);
  sm.A.resize(n, p);
  // A is evaluated as (z + a_u - 2 a_l) / (2 n (a_u - a_l)) with z = sqrt(n) A_tilde,
  // the same affine map written so that both endpoints round to exactly
  // 1/(2n) and 1/n.
  const double sn = std::sqrt(static_cast<double>(n));
  const double denom = 2.0 * n * (sm.a_u - sm.a_l);
  CounterStream rng(seed, 0x5E45);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) {
      const double z = (rng.next_u64() >> 63) ? sm.a_u : sm.a_l;
      sm.A_tilde(i, j) = z / sn;
      sm.A(i, j) = (z + sm.a_u - 2.0 * sm.a_l) / denom;
    }
  }
  return sm;
}

SensingMatrix sensing_from_tilde(const Matrix& A_tilde, double a_l, double a_u) {
  SensingMatrix sm;
  sm.n = static_cast<int>(A_tilde.rows());
  sm.p = static_cast<int>(A_tilde.cols());
  sm.a_l = a_l;
  sm.a_u = a_u;
  const auto map = flux_affine_map(sm.n, a_l, a_u);
  sm.shift = map.shift;
  sm.rescale = map.rescale;
  const double sn = std::sqrt(static_cast<double>(sm.n));
  const double lo = a_l / sn, hi = a_u / sn, slack = 1e-12 * std::max(std::abs(lo), std::abs(hi));
  if (A_tilde.minCoeff() < lo - slack || A_tilde.maxCoeff() > hi + slack)
    throw InvalidArgument("sensing_from_tilde: entries outside [a_l, a_u]/sqrt(n)");
  sm.A_tilde = A_tilde;
  sm.A = (A_tilde.array() + map.shift) / map.rescale;
  return sm;
}

PhysicalReport validate_physical(const Matrix& A) {
  PhysicalReport report;
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      if (A(i, j) < 0.0) report.negative.push_back({int(i), int(j), A(i, j)});
    const double sum = A.col(j).sum();
    if (sum > 1.0 + 1e-12) report.column_sums.push_back({int(j), sum});
  }
  return report;
}

Matrix downsampling_matrix(int p, int kappa) {
  if (kappa < 1 || p < 1 || p % kappa != 0)
    throw InvalidArgument("downsampling_matrix: kappa = " + std::to_string(kappa) + " must divide p = " +
                          std::to_string(p));
  const int n = p / kappa;
  Matrix A = Matrix::Zero(n, p);
  for (int i = 0; i < n; ++i) A.row(i).segment(i * kappa, kappa).setOnes();
  return A;
}

namespace {

double support_delta(const Matrix& G, const std::vector<int>& support, Matrix& sub,
                     Eigen::SelfAdjointEigenSolver<Matrix>& eig) {
  const int m = static_cast<int>(support.size());
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) sub(a, b) = G(support[a], support[b]);
  eig.compute(sub, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  return std::max(ev(m - 1) - 1.0, 1.0 - ev(0));
}

}  // namespace

RipEstimate estimate_rip(const Matrix& Psi, int s, const RipOptions& opts) {
  const int p = static_cast<int>(Psi.cols());
  const int m = 2 * s;
  if (s < 1 || m > p) throw InvalidArgument("estimate_rip: need 1 <= s and 2s <= p");
  const Matrix G = Psi.transpose() * Psi;
  const double supports = binomial(p, m);

  RipEstimate est;
  est.s = s;
  if (supports > opts.budget) {
    if (!opts.sample) throw ComplexityGuard("estimate_rip", supports, opts.budget);
    // Uniform supports via partial Fisher-Yates; each sample owns a substream.
    est.sampled = true;
    est.supports_checked = opts.samples;
    double best = 0.0;
    const auto draw = [&](std::uint64_t idx, std::vector<int>& perm, std::vector<int>& sup, Matrix& sub,
                          Eigen::SelfAdjointEigenSolver<Matrix>& eig) {
      CounterStream rng(opts.seed, idx);
      for (int i = 0; i < p; ++i) perm[i] = i;
      for (int i = 0; i < m; ++i) std::swap(perm[i], perm[i + rng.below(p - i)]);
      sup.assign(perm.begin(), perm.begin() + m);
      std::sort(sup.begin(), sup.end());
      return support_delta(G, sup, sub, eig);
    };
    if (opts.exec == Exec::Serial) {
      std::vector<int> perm(p), sup;
      Matrix sub(m, m);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
      for (std::uint64_t r = 0; r < opts.samples; ++r) best = std::max(best, draw(r, perm, sup, sub, eig));
    } else {
#pragma omp parallel num_threads(worker_count()) reduction(max : best)
      {
        std::vector<int> perm(p), sup;
        Matrix sub(m, m);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
        const auto [begin, end] = detail::thread_slice(opts.samples);
        for (std::uint64_t r = begin; r < end; ++r) best = std::max(best, draw(r, perm, sup, sub, eig));
      }
    }
    est.delta_hat = best;
    return est;
  }

  const auto total = static_cast<std::uint64_t>(supports);
  est.supports_checked = total;
  double best = 0.0;
  if (opts.exec == Exec::Serial) {
    std::vector<int> c(m);
    for (int i = 0; i < m; ++i) c[i] = i;
    Matrix sub(m, m);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
    do {
      best = std::max(best, support_delta(G, c, sub, eig));
    } while (next_combination(c, p));
  } else {
#pragma omp parallel num_threads(worker_count()) reduction(max : best)
    {
      const auto [begin, end] = detail::thread_slice(total);
      if (begin < end) {
        std::vector<int> c;
        unrank_combination(begin, p, m, c);
        Matrix sub(m, m);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
        for (std::uint64_t r = begin; r < end; ++r) {
          best = std::max(best, support_delta(G, c, sub, eig));
          next_combination(c, p);
        }
      }
    }
  }
  est.delta_hat = std::max(best, 0.0);
  return est;
}

RipEstimate estimate_rip(const SensingMatrix& sm, const Basis& basis, int s, const RipOptions& opts) {
  if (sm.p != basis.p) throw InvalidDimension("estimate_rip: sensing matrix and basis disagree on p");
  return estimate_rip(Matrix(sm.A_tilde * basis.D), s, opts);
}

namespace {

template <class T>
void put_le(std::ostream& os, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  os.write(reinterpret_cast<const char*>(&bits), 8);
}

template <class T>
T get_le(std::istream& is) {
  std::uint64_t bits;
  if (!is.read(reinterpret_cast<char*>(&bits), 8)) throw IoError("matrix dump truncated");
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

}  // namespace

void write_matrix_binary(const std::filesystem::path& path, const Matrix& A) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  put_le<std::int64_t>(os, A.rows());
  put_le<std::int64_t>(os, A.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) put_le<double>(os, A(i, j));
  if (!os) throw IoError("write failed for " + path.string());
}

Matrix read_matrix_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  const auto n = get_le<std::int64_t>(is);
  const auto p = get_le<std::int64_t>(is);
  if (n < 0 || p < 0) throw IoError("matrix dump has negative dimensions");
  Matrix A(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) A(i, j) = get_le<double>(is);
  return A;
}

}  // namespace pcs
