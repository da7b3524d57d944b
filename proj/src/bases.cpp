#include "pcs/bases.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "parallel.hpp"

namespace pcs {

BasisKind parse_basis_kind(std::string_view name) {
  if (name == "dct" || name == "DCT") return BasisKind::DCT;
  if (name == "dht" || name == "DHT") return BasisKind::DHT;
  if (name == "dwt" || name == "DWT") return BasisKind::DWT;
  throw InvalidArgument("unknown basis kind '" + std::string(name) + "'");
}

std::string_view to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::DCT: return "dct";
    case BasisKind::DHT: return "dht";
    case BasisKind::DWT: return "dwt";
  }
  return "?";
}

bool is_power_of_two(std::uint64_t p) { return p != 0 && (p & (p - 1)) == 0; }

namespace {

void check_dimension(BasisKind kind, std::uint64_t p) {
  if (p < 2) throw InvalidDimension("basis dimension must be at least 2, got " + std::to_string(p));
  if (kind != BasisKind::DCT && !is_power_of_two(p))
    throw InvalidDimension(std::string(to_string(kind)) + " requires a power-of-two dimension, got " +
                           std::to_string(p));
}

Matrix dct_matrix(int p) {
  Matrix D(p, p);
  const double dc = 1.0 / std::sqrt(static_cast<double>(p));
  const double ac = std::sqrt(2.0 / p);
  for (int j = 0; j < p; ++j) {
    D(j, 0) = dc;
    for (int k = 1; k < p; ++k)
      D(j, k) = ac * std::cos((2.0 * j + 1.0) * k * std::numbers::pi / (2.0 * p));
  }
  return D;
}

Matrix dht_matrix(int p) {
  Matrix D(p, p);
  const double a = 1.0 / std::sqrt(static_cast<double>(p));
  for (int j = 0; j < p; ++j)
    for (int k = 0; k < p; ++k)
      D(j, k) = (std::popcount(static_cast<unsigned>(j & k)) & 1) ? -a : a;
  return D;
}

Matrix dwt_matrix(int p) {
  Matrix D = Matrix::Zero(p, p);
  D.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(p)));
  int col = 1;
  for (int width = p; width >= 2; width /= 2) {
    const double a = 1.0 / std::sqrt(static_cast<double>(width));
    for (int start = 0; start < p; start += width, ++col) {
      D.col(col).segment(start, width / 2).setConstant(a);
      D.col(col).segment(start + width / 2, width / 2).setConstant(-a);
    }
  }
  return D;
}

}  // namespace

Basis make_basis(BasisKind kind, int p) {
  check_dimension(kind, p < 0 ? 0 : static_cast<std::uint64_t>(p));
  Basis b{kind, p, {}, 0.0};
  switch (kind) {
    case BasisKind::DCT: b.D = dct_matrix(p); break;
    case BasisKind::DHT: b.D = dht_matrix(p); break;
    case BasisKind::DWT: b.D = dwt_matrix(p); break;
  }
  b.L = b.D.cwiseAbs().maxCoeff();
  return b;
}

Vector synthesize(const Basis& basis, const Vector& theta) {
  if (theta.size() != basis.p)
    throw InvalidDimension("synthesize: coefficient length " + std::to_string(theta.size()) +
                           " != p = " + std::to_string(basis.p));
  return basis.D * theta;
}

Vector analyze(const Basis& basis, const Vector& f) {
  if (f.size() != basis.p)
    throw InvalidDimension("analyze: pixel length " + std::to_string(f.size()) + " != p = " +
                           std::to_string(basis.p));
  return basis.D.transpose() * f;
}

double lambda_closed(BasisKind kind, std::uint64_t p, int k, LambdaForm form) {
  check_dimension(kind, p);
  if (k < 1 || static_cast<std::uint64_t>(k) > p - 1)
    throw InvalidArgument("lambda_closed: k must lie in [1, p-1], got " + std::to_string(k));
  const double sp = std::sqrt(static_cast<double>(p));
  switch (kind) {
    case BasisKind::DCT: return std::numbers::sqrt2 * k / sp;
    case BasisKind::DHT: return form == LambdaForm::Table1 ? std::numbers::sqrt2 * k / sp : k / sp;
    case BasisKind::DWT: {
      if (form == LambdaForm::Table1) return 1.0 / (std::numbers::sqrt2 - 1.0);
      const int m = std::countr_zero(p);
      const int mprime = std::min(k, form == LambdaForm::TruncatedScales ? m - 1 : m);
      return (1.0 - std::exp2(-0.5 * mprime)) / (std::numbers::sqrt2 - 1.0);
    }
  }
  return 0.0;
}

namespace {

// Best ||Dbar v||_inf over all sign patterns on one support. Flipping every
// sign leaves the norm unchanged, so the first sign is pinned to +1.
double support_lambda(const Matrix& Dbar, const std::vector<int>& support, Vector& acc) {
  const int k = static_cast<int>(support.size());
  double best = 0.0;
  const std::uint32_t patterns = 1u << (k - 1);
  for (std::uint32_t mask = 0; mask < patterns; ++mask) {
    acc = Dbar.col(support[0]);
    for (int t = 1; t < k; ++t) {
      if (mask & (1u << (t - 1)))
        acc -= Dbar.col(support[t]);
      else
        acc += Dbar.col(support[t]);
    }
    best = std::max(best, acc.cwiseAbs().maxCoeff());
  }
  return best;
}

}  // namespace

double lambda_brute(const Basis& basis, int k, const LambdaBruteOptions& opts) {
  const int cols = basis.p - 1;
  if (k < 1 || k > cols)
    throw InvalidArgument("lambda_brute: k must lie in [1, p-1], got " + std::to_string(k));
  const double supports = binomial(cols, k);
  const double required = supports * std::exp2(k);
  if (required > opts.budget) throw ComplexityGuard("lambda_brute", required, opts.budget);

  const Matrix Dbar = basis.Dbar();
  const auto total = static_cast<std::uint64_t>(supports);
  double best = 0.0;

  if (opts.exec == Exec::Serial) {
    std::vector<int> c(k);
    for (int i = 0; i < k; ++i) c[i] = i;
    Vector acc(basis.p);
    do {
      best = std::max(best, support_lambda(Dbar, c, acc));
    } while (next_combination(c, cols));
    return best;
  }

#pragma omp parallel num_threads(worker_count()) reduction(max : best)
  {
    const auto [begin, end] = detail::thread_slice(total);
    if (begin < end) {
      std::vector<int> c;
      unrank_combination(begin, cols, k, c);
      Vector acc(basis.p);
      for (std::uint64_t r = begin; r < end; ++r) {
        best = std::max(best, support_lambda(Dbar, c, acc));
        next_combination(c, cols);
      }
    }
  }
  return best;
}

}  // namespace pcs
