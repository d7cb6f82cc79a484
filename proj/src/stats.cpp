#include "csi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "csi/kernels.hpp"

namespace csi {

Moments moments(const std::vector<double>& v) {
  Moments m;
  m.n = static_cast<std::int64_t>(v.size());
  if (m.n == 0) return m;
  m.mean = kern::block_sum(v.data(), v.size()) / m.n;
  m.min = *std::min_element(v.begin(), v.end());
  m.max = *std::max_element(v.begin(), v.end());
  if (m.n < 2) return m;
  const double ss = kern::block_sumsqdev(v.data(), v.size(), m.mean);
  m.var = ss / (m.n - 1);
  m.sd = std::sqrt(m.var);
  m.stderr_mean = m.sd / std::sqrt(static_cast<double>(m.n));
  double s3 = 0;
  for (double x : v) {
    const double d = x - m.mean;
    s3 += d * d * d;
  }
  s3 /= m.n;
  m.skew = m.sd > 0 ? s3 / (m.sd * m.sd * m.sd) : 0;
  return m;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double ks_vs_normal(std::vector<double> sample, double sigma) {
  if (sample.empty()) return 0;
  std::sort(sample.begin(), sample.end());
  const double N = static_cast<double>(sample.size());
  double d = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = normal_cdf(sample[i] / sigma);
    d = std::max(d, std::abs(f - static_cast<double>(i) / N));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / N - f));
  }
  return d;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1 - frac) + v[lo + 1] * frac;
}

double median(const std::vector<double>& v) { return quantile(v, 0.5); }

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) return 0;
  const std::size_t n = a.size();
  const double ma = kern::block_sum(a.data(), n) / n;
  const double mb = kern::block_sum(b.data(), n) / n;
  double sab = 0;
  for (std::size_t i = 0; i < n; ++i) sab += (a[i] - ma) * (b[i] - mb);
  const double sa = kern::block_sumsqdev(a.data(), n, ma);
  const double sb = kern::block_sumsqdev(b.data(), n, mb);
  if (sa == 0 || sb == 0) return 0;
  return sab / std::sqrt(sa * sb);
}

namespace {

// series expansion for P(a,x), continued fraction for Q(a,x)
double gamma_p_series(double a, double x) {
  double sum = 1.0 / a, term = sum, ap = a;
  for (int k = 0; k < 500; ++k) {
    ap += 1;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1 - a, c = 1 / tiny, d = 1 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
  if (x < 0 || a <= 0) throw std::invalid_argument("gamma_q domain");
  if (x == 0) return 1;
  if (x < a + 1) return 1 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_tail(double stat, int dof) { return gamma_q(dof / 2.0, stat / 2.0); }

}  // namespace csi
