#include "csi/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace csi::kern {

namespace {

std::size_t find_match_desc_scalar(const std::uint8_t* buf, std::size_t start_max,
                                   const std::uint8_t* pat, std::size_t n) {
  const std::uint8_t first = pat[0];
  for (std::size_t s = start_max;; --s) {
    if (buf[s] == first) {
      std::size_t j = 1;
      while (j < n && buf[s + j] == pat[j]) ++j;
      if (j == n) return s;
    }
    if (s == 0) break;
  }
  return npos;
}

double block_sum_scalar(const double* a, std::size_t len) {
  double acc[4] = {0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    acc[0] += a[i];
    acc[1] += a[i + 1];
    acc[2] += a[i + 2];
    acc[3] += a[i + 3];
  }
  double tail = 0;
  for (; i < len; ++i) tail += a[i];
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + tail;
}

double block_dot_scalar(const double* a, const double* b, std::size_t len) {
  double acc[4] = {0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    acc[0] += a[i] * b[i];
    acc[1] += a[i + 1] * b[i + 1];
    acc[2] += a[i + 2] * b[i + 2];
    acc[3] += a[i + 3] * b[i + 3];
  }
  double tail = 0;
  for (; i < len; ++i) tail += a[i] * b[i];
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + tail;
}

double block_sumsqdev_scalar(const double* a, std::size_t len, double mu) {
  double acc[4] = {0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    double d0 = a[i] - mu, d1 = a[i + 1] - mu, d2 = a[i + 2] - mu, d3 = a[i + 3] - mu;
    acc[0] += d0 * d0;
    acc[1] += d1 * d1;
    acc[2] += d2 * d2;
    acc[3] += d3 * d3;
  }
  double tail = 0;
  for (; i < len; ++i) {
    double d = a[i] - mu;
    tail += d * d;
  }
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + tail;
}

const KernelTable kScalar = {
    find_match_desc_scalar, block_sum_scalar, block_dot_scalar, block_sumsqdev_scalar,
    "scalar"};

const KernelTable* pick() {
  const char* env = std::getenv("CSI_KERNELS");
  if (env && std::strcmp(env, "scalar") == 0) return &kScalar;
  const KernelTable* avx2 = avx2_table();
  if (env && std::strcmp(env, "avx2") == 0 && avx2) return avx2;
  if (avx2) return avx2;
  return &kScalar;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

#if !defined(CSI_HAVE_AVX2_BUILD)
const KernelTable* avx2_table() { return nullptr; }
#endif

const KernelTable& active() {
  static const KernelTable* table = pick();
  return *table;
}

}  // namespace csi::kern
