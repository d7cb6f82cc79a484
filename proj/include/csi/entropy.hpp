#pragma once

#include <cstdint>
#include <string>

#include "csi/model.hpp"

namespace csi {

struct RateEstimate {
  double value = 0;   // bits, or bits/symbol where the operation says so
  double stderr_ = 0; // 0 for exact/analytic methods
  std::string method; // exact_enum | mc_direct | series | analytic_memoryless
  int n_used = 0;
  std::int64_t samples_used = 0;
  int truncation_lag = -1; // series only
  double tail_diag = 0;    // |c_L| for the series route
};

// Exhaustive enumeration over all (x_1^n, y_1^n). Guarded by
// (|X||Y|)^n <= 1e7 (EnumerationTooLarge).
struct ExactBlockStats {
  int n = 0;
  double h_joint_bits = 0; // H(X_1^n, Y_1^n)
  double h_y_bits = 0;     // H(Y_1^n)
  double h_cond_bits = 0;  // H(X_1^n | Y_1^n) = E[d_n]
  double var_d_bits2 = 0;  // Var(d_n)
};
ExactBlockStats exact_block_stats(const PairModel& model, int n);

// H(X_1^n|Y_1^n) in total bits, exact enumeration.
RateEstimate conditional_entropy_exact(const PairModel& model, int n);

// Monte Carlo mean of d_n (total bits) over seeded replicas.
RateEstimate conditional_entropy_mc(const PairModel& model, int n, std::int64_t samples,
                                    std::uint64_t seed, int jobs = 1);

// Var(d_n)/n (bits^2/symbol) from seeded replicas, Bessel-corrected.
RateEstimate varentropy_direct(const PairModel& model, int n, std::int64_t samples,
                               std::uint64_t seed, int jobs = 1);

// [Var(d_n) - Var(d_{n-1})] by enumeration; converges geometrically for
// mixing Markov models.
RateEstimate varentropy_exact_diff(const PairModel& model, int n);

// Autocovariance-series route: c_0 + 2 sum_{k<=L} c_k of the windowed
// per-symbol terms f_j over long stationary paths.
RateEstimate varentropy_series(const PairModel& model, std::int64_t paths, int path_len,
                               int max_lag, int window, std::uint64_t seed, int jobs = 1);

// Exact per-symbol H and varentropy for memoryless models (WrongKind otherwise).
struct MemorylessRates {
  double h_bits = 0;
  double varentropy_bits2 = 0;
};
MemorylessRates memoryless_analytic(const PairModel& model);

// Headline (h, sigma^2) used by the experiment harness: analytic for
// memoryless models, enumeration differences plus the series route otherwise.
struct RatePair {
  RateEstimate h;       // bits/symbol
  RateEstimate sigma2;  // bits^2/symbol
};
RatePair estimate_rates(const PairModel& model, std::uint64_t seed = 20120507, int jobs = 1);

}  // namespace csi
