#include <doctest.h>

#include <set>

#include "csi/rng.hpp"

using csi::CounterRng;

TEST_CASE("same seed and stream reproduce the sequence") {
  CounterRng a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("streams are distinct") {
  CounterRng a(42, 0), b(42, 1), c(43, 0);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a.next_u64();
    if (va == b.next_u64()) ++same_ab;
    if (va == c.next_u64()) ++same_ac;
  }
  CHECK(same_ab == 0);
  CHECK(same_ac == 0);
}

TEST_CASE("doubles live in [0,1) and look uniform") {
  CounterRng r(1, 0);
  const int N = 200000;
  int buckets[10] = {};
  for (int i = 0; i < N; ++i) {
    const double u = r.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    ++buckets[static_cast<int>(u * 10)];
  }
  for (int b = 0; b < 10; ++b) {
    CHECK(buckets[b] > N / 10 - 5 * 140);  // ~5 sigma band
    CHECK(buckets[b] < N / 10 + 5 * 140);
  }
}

TEST_CASE("next_below stays in range") {
  CounterRng r(9, 3);
  for (int i = 0; i < 1000; ++i) CHECK(r.next_below(13) < 13);
}
