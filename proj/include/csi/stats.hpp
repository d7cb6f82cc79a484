#pragma once

#include <cstdint>
#include <vector>

namespace csi {

struct Moments {
  std::int64_t n = 0;
  double mean = 0;
  double var = 0;  // Bessel-corrected
  double sd = 0;
  double stderr_mean = 0;
  double skew = 0;
  double min = 0, max = 0;
};
Moments moments(const std::vector<double>& v);

double normal_cdf(double z);  // standard normal

// One-sample KS distance of the sample against N(0, sigma^2). Sorts a copy.
double ks_vs_normal(std::vector<double> sample, double sigma);

// q in [0,1]; linear interpolation on the sorted copy
double quantile(std::vector<double> v, double q);
double median(const std::vector<double>& v);

double correlation(const std::vector<double>& a, const std::vector<double>& b);

// regularized upper incomplete gamma Q(a, x); chi-square tail
// P(Chi2_k > x) = gamma_q(k/2, x/2)
double gamma_q(double a, double x);
double chi_square_tail(double stat, int dof);

}  // namespace csi
