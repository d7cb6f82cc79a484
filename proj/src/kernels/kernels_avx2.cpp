#include "csi/kernels.hpp"

#include <cstring>
#include <immintrin.h>

namespace csi::kern {

namespace {

inline bool verify(const std::uint8_t* buf, std::size_t s, const std::uint8_t* pat,
                   std::size_t n) {
  return std::memcmp(buf + s, pat, n) == 0;
}

std::size_t find_match_desc_avx2(const std::uint8_t* buf, std::size_t start_max,
                                 const std::uint8_t* pat, std::size_t n) {
  const __m256i first = _mm256_set1_epi8(static_cast<char>(pat[0]));
  std::size_t s = start_max;
  // whole 32-wide blocks of candidate start positions [s-31, s]
  while (s + 1 >= 32) {
    const std::size_t base = s - 31;
    const __m256i chunk = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(buf + base));
    std::uint32_t mask = static_cast<std::uint32_t>(
        _mm256_movemask_epi8(_mm256_cmpeq_epi8(chunk, first)));
    while (mask) {
      const int bit = 31 - __builtin_clz(mask);  // highest candidate first
      const std::size_t cand = base + static_cast<std::size_t>(bit);
      if (verify(buf, cand, pat, n)) return cand;
      mask &= ~(1u << bit);
    }
    if (base == 0) return npos;
    s = base - 1;
  }
  // bottom partial block
  for (;; --s) {
    if (buf[s] == pat[0] && verify(buf, s, pat, n)) return s;
    if (s == 0) break;
  }
  return npos;
}

inline double hsum(__m256d acc) {
  // ((lane0 + lane1) + (lane2 + lane3)), matching the scalar reference
  __m128d lo = _mm256_castpd256_pd128(acc);
  __m128d hi = _mm256_extractf128_pd(acc, 1);
  __m128d lo_s = _mm_add_sd(lo, _mm_unpackhi_pd(lo, lo));
  __m128d hi_s = _mm_add_sd(hi, _mm_unpackhi_pd(hi, hi));
  return _mm_cvtsd_f64(_mm_add_sd(lo_s, hi_s));
}

double block_sum_avx2(const double* a, std::size_t len) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double tail = 0;
  for (; i < len; ++i) tail += a[i];
  return hsum(acc) + tail;
}

double block_dot_avx2(const double* a, const double* b, std::size_t len) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  double tail = 0;
  for (; i < len; ++i) tail += a[i] * b[i];
  return hsum(acc) + tail;
}

double block_sumsqdev_avx2(const double* a, std::size_t len, double mu) {
  const __m256d vmu = _mm256_set1_pd(mu);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), vmu);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double tail = 0;
  for (; i < len; ++i) {
    double d = a[i] - mu;
    tail += d * d;
  }
  return hsum(acc) + tail;
}

const KernelTable kAvx2 = {
    find_match_desc_avx2, block_sum_avx2, block_dot_avx2, block_sumsqdev_avx2, "avx2"};

}  // namespace

const KernelTable* avx2_table() {
  if (__builtin_cpu_supports("avx2")) return &kAvx2;
  return nullptr;
}

}  // namespace csi::kern
