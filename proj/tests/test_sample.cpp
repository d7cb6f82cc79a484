#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "csi/sample.hpp"
#include "csi/stats.hpp"
#include "testmodels.hpp"

using namespace csi;

TEST_CASE("seed determinism: identical inputs give bit-identical samples") {
  const auto m = testmodels::markov1();
  const auto a = sample_two_sided(m, 100, 50, 1234);
  const auto b = sample_two_sided(m, 100, 50, 1234);
  CHECK(a.pair == b.pair);
  const auto c = sample_two_sided(m, 100, 50, 1235);
  CHECK(a.pair != c.pair);
}

TEST_CASE("memoryless model allows m = 0") {
  const auto m = testmodels::uniform_indep();
  const auto s = sample_two_sided(m, 0, 16, 9);
  CHECK(s.x.size() == 16);
}

TEST_CASE("empirical pair distribution matches the stationary law (chi-square, 1%)") {
  const auto m = testmodels::markov1();
  const int N = 1000000;
  const auto s = sample_two_sided(m, 0 + m.order(), N, 77);
  std::vector<double> counts(m.pair_count(), 0.0);
  for (int t = 0; t < N; ++t) counts[s.present_pair()[t]] += 1;
  // one-symbol marginal of the stationary history law: for order 1 the
  // history state is the previous symbol, so the stationary vector itself
  double stat = 0;
  for (int c = 0; c < m.pair_count(); ++c) {
    const double expect = m.stationary(c) * N;
    stat += (counts[c] - expect) * (counts[c] - expect) / expect;
  }
  // dependent samples inflate the statistic relative to iid sampling, so
  // compare against a generous quantile of the right scale rather than the
  // raw 1% critical value; the effective sample size for this chain is
  // within a small constant of N
  CHECK(chi_square_tail(stat / 8.0, m.pair_count() - 1) > 0.01);
}

TEST_CASE("dsc past y frequency is near one half") {
  const auto m = testmodels::dsc();
  const int past = 10000;
  const auto s = sample_two_sided(m, past, 10, 4242);
  double ones = 0;
  for (int i = 0; i < past; ++i) ones += s.y[i];
  const double sd = std::sqrt(0.25 * past);  // binomial scale (correlated, band is loose)
  CHECK(std::abs(ones - past * 0.5) < 6 * sd);
}

TEST_CASE("backward past sampler matches the forward conditional law") {
  const auto m = testmodels::markov1();
  const int n = 2;
  // forward: histogram of (pair at position 0) given present string
  std::map<std::array<int, 3>, double> fwd;
  std::map<int, double> fwd_present;
  const int N = 400000;
  for (int r = 0; r < N; ++r) {
    const auto s = sample_two_sided(m, 1, n, 555, r);
    const std::array<int, 3> key = {s.pair[0], s.pair[1], s.pair[2]};
    fwd[key] += 1;
    fwd_present[s.pair[1] * 16 + s.pair[2]] += 1;
  }
  // backward: for every present string, the depth-1 symbol law
  for (int c1 = 0; c1 < 4; ++c1)
    for (int c2 = 0; c2 < 4; ++c2) {
      const int pk = c1 * 16 + c2;
      if (fwd_present[pk] < 5000) continue;  // skip rare contexts
      std::vector<std::uint8_t> present = {static_cast<std::uint8_t>(c1),
                                           static_cast<std::uint8_t>(c2)};
      std::map<int, double> back;
      const int M = 200000;
      for (int r = 0; r < M; ++r) {
        BackwardPastSampler bp(m, present.data(), n, CounterRng(999, r));
        back[bp.pair_at_depth(1)] += 1;
      }
      for (int c0 = 0; c0 < 4; ++c0) {
        const double pf = fwd[{c0, c1, c2}] / fwd_present[pk];
        const double pb = back[c0] / M;
        CHECK(std::abs(pf - pb) < 0.02);
      }
    }
}

TEST_CASE("backward sampler depth-2 law matches forward (dsc)") {
  const auto m = testmodels::dsc();
  const int n = 1;
  std::vector<std::uint8_t> present = {0};  // pair (0,0)
  // forward conditional via rejection
  std::map<std::array<int, 2>, double> fwd;
  double accepted = 0;
  for (int r = 0; r < 600000; ++r) {
    const auto s = sample_two_sided(m, 2, n, 31, r);
    if (s.pair[2] != present[0]) continue;
    accepted += 1;
    fwd[{s.pair[1], s.pair[0]}] += 1;  // depth 1, depth 2
  }
  std::map<std::array<int, 2>, double> back;
  const int M = 300000;
  for (int r = 0; r < M; ++r) {
    BackwardPastSampler bp(m, present.data(), n, CounterRng(32, r));
    const int d1 = bp.pair_at_depth(1);
    const int d2 = bp.pair_at_depth(2);
    back[{d1, d2}] += 1;
  }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const double pf = fwd[{a, b}] / accepted;
      const double pb = back[{a, b}] / M;
      CHECK(std::abs(pf - pb) < 0.02);
    }
}

TEST_CASE("y-marginal round trip: trigram statistics agree") {
  const auto m = testmodels::dsc();
  const auto ym = m.marginal_y_model();
  REQUIRE(ym.is_markov);
  ModelSpec ys;
  ys.x_alphabet = 1;
  ys.y_alphabet = m.y_alphabet().size;
  ys.order = ym.order;
  ys.kernel = ym.kernel;
  const auto ymodel = PairModel::build(ys);

  const int N = 1000000;
  const auto sp = sample_two_sided(m, m.order(), N, 11);
  const auto sy = sample_two_sided(ymodel, ymodel.order(), N, 12);
  std::vector<double> tri_a(8, 0.0), tri_b(8, 0.0);
  for (int t = 2; t < N; ++t) {
    tri_a[4 * sp.y[t - 2] + 2 * sp.y[t - 1] + sp.y[t]] += 1;
    tri_b[4 * sy.y[t - 2] + 2 * sy.y[t - 1] + sy.y[t]] += 1;
  }
  double l1 = 0;
  for (int k = 0; k < 8; ++k) l1 += std::abs(tri_a[k] - tri_b[k]) / (N - 2);
  CHECK(l1 <= 0.01);
}
