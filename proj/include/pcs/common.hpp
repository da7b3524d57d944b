#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Counts = std::vector<std::int64_t>;

// Error hierarchy. Every module throws one of these; the CLI maps them to a
// nonzero exit status and a JSON error object.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidDimension : Error {
  using Error::Error;
};
struct InvalidArgument : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct ComplexityGuard : Error {
  ComplexityGuard(const std::string& what, double required, double budget)
      : Error(what + ": requires " + std::to_string(required) +
              " evaluations, budget " + std::to_string(budget)),
        required(required),
        budget(budget) {}
  double required;
  double budget;
};
struct UnsupportedBasis : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

// Serial is the reference path; Parallel must reproduce it bit for bit.
enum class Exec { Serial, Parallel };

/// Worker count for parallel kernels: omp_get_max_threads() capped by the
/// POISSON_CS_THREADS environment variable when set to a positive integer.
int worker_count();

// ---------------------------------------------------------------------------
// Seeding. All randomness in the project flows from 64-bit seeds through these
// mixers so that results do not depend on evaluation order or thread count.

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derive an independent child seed from (parent, tag).
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) {
  return mix64(mix64(parent) ^ mix64(tag * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
}

/// Counter-based stream: the k-th draw is a pure function of (key, k).
class CounterStream {
 public:
  explicit CounterStream(std::uint64_t key) : key_(key) {}
  CounterStream(std::uint64_t seed, std::uint64_t substream)
      : key_(derive_seed(seed, substream)) {}

  std::uint64_t next_u64() { return mix64(key_ ^ mix64(++counter_)); }

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) by rejection (bound > 0).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Binomial coefficient as a double (exact for the desk-scale sizes used here).
double binomial(std::uint64_t n, std::uint64_t k);

/// Unrank the r-th k-subset of {0..n-1} in lexicographic order.
void unrank_combination(std::uint64_t r, int n, int k, std::vector<int>& out);

/// Advance a k-subset to its lexicographic successor; false when exhausted.
bool next_combination(std::vector<int>& c, int n);

}  // namespace pcs
