#pragma once

#include <cstdint>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pcs::detail {

// Contiguous share of [0, total) for the calling thread of a parallel region.
inline std::pair<std::uint64_t, std::uint64_t> thread_slice(std::uint64_t total) {
#ifdef _OPENMP
  const auto nt = static_cast<std::uint64_t>(omp_get_num_threads());
  const auto tid = static_cast<std::uint64_t>(omp_get_thread_num());
#else
  const std::uint64_t nt = 1, tid = 0;
#endif
  return {total * tid / nt, total * (tid + 1) / nt};
}

}  // namespace pcs::detail
