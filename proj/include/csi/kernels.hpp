#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

// Hot inner loops: pattern scanning over symbol buffers and blocked
// reductions over double arrays. Each kernel has a scalar reference and an
// AVX2 variant; the active set is picked once at startup from cpuid and can
// be overridden with the CSI_KERNELS environment variable ("scalar"/"avx2").
//
// The reductions are defined as 4-lane blocked loops so that the scalar
// reference and the AVX2 variant produce bit-identical results.

namespace csi::kern {

constexpr std::size_t npos = static_cast<std::size_t>(-1);

struct KernelTable {
  // Highest start index s <= start_max with buf[s..s+n) == pat[0..n).
  // Returns npos when there is no such s. n >= 1, start_max + n <= buf_len.
  std::size_t (*find_match_desc)(const std::uint8_t* buf, std::size_t start_max,
                                 const std::uint8_t* pat, std::size_t n);
  // 4-lane blocked sum of a[0..len)
  double (*block_sum)(const double* a, std::size_t len);
  // 4-lane blocked dot product of a[0..len), b[0..len)
  double (*block_dot)(const double* a, const double* b, std::size_t len);
  // 4-lane blocked sum of squared deviations from mu
  double (*block_sumsqdev)(const double* a, std::size_t len, double mu);
  const char* name;
};

// Active table (dispatch decided once, thread-safe).
const KernelTable& active();

// Specific variants, mainly for equivalence tests.
const KernelTable& scalar_table();
const KernelTable* avx2_table();  // nullptr if unsupported at build or run time

inline std::size_t find_match_desc(const std::uint8_t* buf, std::size_t start_max,
                                   const std::uint8_t* pat, std::size_t n) {
  return active().find_match_desc(buf, start_max, pat, n);
}
inline double block_sum(const double* a, std::size_t len) { return active().block_sum(a, len); }
inline double block_dot(const double* a, const double* b, std::size_t len) {
  return active().block_dot(a, b, len);
}
inline double block_sumsqdev(const double* a, std::size_t len, double mu) {
  return active().block_sumsqdev(a, len, mu);
}

}  // namespace csi::kern
