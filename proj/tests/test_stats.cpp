#include <doctest.h>

#include <cmath>
#include <vector>

#include "csi/rng.hpp"
#include "csi/stats.hpp"

using namespace csi;

TEST_CASE("moments of a simple vector") {
  std::vector<double> v = {1, 2, 3, 4, 5};
  const auto m = moments(v);
  CHECK(m.mean == doctest::Approx(3));
  CHECK(m.var == doctest::Approx(2.5));
  CHECK(m.min == 1);
  CHECK(m.max == 5);
  CHECK(m.skew == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("normal cdf reference points") {
  CHECK(normal_cdf(0) == doctest::Approx(0.5));
  CHECK(normal_cdf(1.959963985) == doctest::Approx(0.975).epsilon(1e-6));
  CHECK(normal_cdf(-1.959963985) == doctest::Approx(0.025).epsilon(1e-6));
}

TEST_CASE("ks statistic is small for exact normal quantiles") {
  const int N = 2000;
  std::vector<double> z(N);
  // inverse-cdf grid via bisection on normal_cdf
  for (int i = 0; i < N; ++i) {
    const double target = (i + 0.5) / N;
    double lo = -10, hi = 10;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (normal_cdf(mid) < target ? lo : hi) = mid;
    }
    z[i] = lo * 2.0;  // sigma = 2
  }
  CHECK(ks_vs_normal(z, 2.0) < 1.0 / N + 1e-6);
  // wrong sigma must be detected
  CHECK(ks_vs_normal(z, 1.0) > 0.1);
}

TEST_CASE("quantiles and median") {
  std::vector<double> v = {5, 1, 3, 2, 4};
  CHECK(median(v) == doctest::Approx(3));
  CHECK(quantile(v, 0.0) == doctest::Approx(1));
  CHECK(quantile(v, 1.0) == doctest::Approx(5));
  CHECK(quantile(v, 0.25) == doctest::Approx(2));
}

TEST_CASE("correlation") {
  std::vector<double> a = {1, 2, 3, 4}, b = {2, 4, 6, 8}, c = {4, 3, 2, 1};
  CHECK(correlation(a, b) == doctest::Approx(1));
  CHECK(correlation(a, c) == doctest::Approx(-1));
}

TEST_CASE("chi-square tail reference values") {
  // classic table entries
  CHECK(chi_square_tail(11.345, 3) == doctest::Approx(0.01).epsilon(1e-3));
  CHECK(chi_square_tail(3.841, 1) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(chi_square_tail(0.0, 5) == doctest::Approx(1.0));
}
