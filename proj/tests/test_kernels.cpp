#include <doctest.h>

#include <cstring>
#include <vector>

#include "csi/kernels.hpp"
#include "csi/rng.hpp"

namespace k = csi::kern;

namespace {

std::size_t naive_find_desc(const std::vector<std::uint8_t>& buf, std::size_t start_max,
                            const std::vector<std::uint8_t>& pat) {
  for (std::size_t s = start_max + 1; s-- > 0;)
    if (std::memcmp(buf.data() + s, pat.data(), pat.size()) == 0) return s;
  return k::npos;
}

}  // namespace

TEST_CASE("match scan agrees with the naive reference on random buffers") {
  csi::CounterRng rng(123, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int alpha = 2 + static_cast<int>(rng.next_below(3));
    const std::size_t len = 40 + rng.next_below(400);
    const std::size_t n = 1 + rng.next_below(6);
    std::vector<std::uint8_t> buf(len);
    for (auto& b : buf) b = static_cast<std::uint8_t>(rng.next_below(alpha));
    std::vector<std::uint8_t> pat(n);
    for (auto& b : pat) b = static_cast<std::uint8_t>(rng.next_below(alpha));
    const std::size_t start_max = len - n;
    const auto expect = naive_find_desc(buf, start_max, pat);
    CHECK(k::scalar_table().find_match_desc(buf.data(), start_max, pat.data(), n) == expect);
    if (const auto* avx2 = k::avx2_table())
      CHECK(avx2->find_match_desc(buf.data(), start_max, pat.data(), n) == expect);
  }
}

TEST_CASE("match scan handles periodic and edge-position patterns") {
  std::vector<std::uint8_t> buf = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  std::vector<std::uint8_t> pat = {0, 1, 0};
  CHECK(k::scalar_table().find_match_desc(buf.data(), 7, pat.data(), 3) == 6);
  CHECK(k::scalar_table().find_match_desc(buf.data(), 5, pat.data(), 3) == 4);
  CHECK(k::scalar_table().find_match_desc(buf.data(), 0, pat.data(), 3) == 0);
  std::vector<std::uint8_t> miss = {1, 1, 1};
  CHECK(k::scalar_table().find_match_desc(buf.data(), 7, miss.data(), 3) == k::npos);
  if (const auto* avx2 = k::avx2_table()) {
    CHECK(avx2->find_match_desc(buf.data(), 7, pat.data(), 3) == 6);
    CHECK(avx2->find_match_desc(buf.data(), 7, miss.data(), 3) == k::npos);
  }
}

TEST_CASE("blocked reductions are bit-identical across variants") {
  csi::CounterRng rng(7, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t len = rng.next_below(300);
    std::vector<double> a(len), b(len);
    for (std::size_t i = 0; i < len; ++i) {
      a[i] = rng.next_double() * 2 - 1;
      b[i] = rng.next_double() * 2 - 1;
    }
    const auto& sc = k::scalar_table();
    if (const auto* avx2 = k::avx2_table()) {
      CHECK(sc.block_sum(a.data(), len) == avx2->block_sum(a.data(), len));
      CHECK(sc.block_dot(a.data(), b.data(), len) == avx2->block_dot(a.data(), b.data(), len));
      CHECK(sc.block_sumsqdev(a.data(), len, 0.25) == avx2->block_sumsqdev(a.data(), len, 0.25));
    }
  }
}

TEST_CASE("reduction values are correct") {
  std::vector<double> a = {1, 2, 3, 4, 5, 6, 7};
  CHECK(k::block_sum(a.data(), a.size()) == doctest::Approx(28));
  CHECK(k::block_dot(a.data(), a.data(), a.size()) == doctest::Approx(140));
  CHECK(k::block_sumsqdev(a.data(), a.size(), 4.0) == doctest::Approx(28));
}
