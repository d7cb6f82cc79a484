#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csi/entropy.hpp"
#include "csi/model.hpp"
#include "csi/report.hpp"

namespace csi {

// Rate inputs shared by all experiments; estimated once and passed in
// explicitly so that every replica uses the same centering.
struct Rates {
  double h = 0;        // bits/symbol
  double sigma2 = 0;   // bits^2/symbol
  std::string h_method, sigma2_method;

  static Rates from(const RatePair& rp) {
    return {rp.h.value, rp.sigma2.value, rp.h.method, rp.sigma2.method};
  }
  Json to_json() const {
    Json j;
    j["h_bits"] = num(h);
    j["h_method"] = h_method;
    j["sigma2_bits2"] = num(sigma2);
    j["sigma2_method"] = sigma2_method;
    return j;
  }
};

constexpr double kDegenerateSigma2 = 1e-12;

// ---- CLT for the conditional information density (normalized Z_n) ----
struct CltDensityOpts {
  int n = 1024;
  std::int64_t samples = 10000;
  std::uint64_t seed = 1;
  int jobs = 1;
  double ks_allowance = 0.01;  // added to the 5% KS critical value
};
ExperimentReport clt_density_experiment(const PairModel& model, const Rates& rates,
                                        const CltDensityOpts& o);

// ---- CLT checks for codelengths (optimal and prefix) ----
struct CltCodelengthOpts {
  int n = 8;
  std::int64_t samples = 100000;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::vector<int> tau = {8, 12, 16};  // converse thresholds
};
ExperimentReport clt_codelength_experiment(const PairModel& model, const Rates& rates,
                                           const CltCodelengthOpts& o);

// ---- converse frequency bound over an n-grid ----
struct ConverseOpts {
  std::vector<int> n_grid = {8, 64, 256};
  std::vector<int> tau = {8, 12, 16};
  std::int64_t samples = 100000;
  std::uint64_t seed = 1;
  int jobs = 1;
};
ExperimentReport converse_experiment(const PairModel& model, const Rates& rates,
                                     const ConverseOpts& o);

// ---- LIL envelope ----
struct LilOpts {
  std::int64_t n_max = 1000000;
  int paths = 64;
  std::int64_t n_min = 1000;  // statistics collected for n in [n_min, n_max]
  std::uint64_t seed = 1;
  int jobs = 1;
  double band_lo = 0.6, band_hi = 1.4;  // qualitative band in units of sigma
  std::string trajectory_csv;           // optional W(n) export on a geometric grid
};
ExperimentReport lil_experiment(const PairModel& model, const Rates& rates, const LilOpts& o);

// ---- CLT for conditional recurrence times ----
struct RecurrenceCltOpts {
  int n = 256;
  std::int64_t samples = 4000;
  std::int64_t m = 1 << 20;        // direct method past length
  std::string method = "direct";   // direct | renewal
  std::uint64_t seed = 1;
  int jobs = 1;
  double ks_threshold = 0.05;
  double max_truncation = 0.01;
};
ExperimentReport recurrence_clt_experiment(const PairModel& model, const Rates& rates,
                                           const RecurrenceCltOpts& o);

// ---- dispersion: per-symbol variance of codelengths vs the varentropy ----
struct DispersionOpts {
  int n = 1024;
  std::int64_t samples = 20000;
  std::uint64_t seed = 1;
  int jobs = 1;
  double rel_tol = 0.05;
  bool exact_fstar = false;  // enumerate Var[l(f*)] instead of sampling l(prefix)
  double exact_rel_tol = 0.15;
};
ExperimentReport dispersion_experiment(const PairModel& model, const Rates& rates,
                                       const DispersionOpts& o);

// ---- first-order rates along an n-grid ----
struct FirstOrderOpts {
  std::vector<int> n_grid = {256, 1024, 4096};
  int paths = 64;
  std::int64_t m = 1 << 20;  // past length for the token-rate trajectory
  bool token_rates = false;
  std::uint64_t seed = 1;
  int jobs = 1;
  double tol = 0.01;
  std::string trajectory_csv;
};
ExperimentReport first_order_experiment(const PairModel& model, const Rates& rates,
                                        const FirstOrderOpts& o);

// ---- conditional Kac ----
struct KacTarget {
  std::vector<int> x, y;
};
struct KacOpts {
  int n = 2;                       // grid mode: all/selected strings of this length
  std::vector<KacTarget> targets;  // explicit targets; grid is built when empty
  int max_grid_targets = 12;
  std::int64_t replicas = 100000;
  double k_occupancy = 100;        // m = max(2^16, ceil(K / P(x,y)))
  std::uint64_t seed = 1;
  int jobs = 1;
  double max_truncation = 0.001;
};
ExperimentReport kac_experiment(const PairModel& model, const KacOpts& o);

// ---- LZ-SI codec experiments ----
struct LzsiRoundtripOpts {
  int n = 16;
  std::int64_t m = 1 << 18;
  std::int64_t blocks = 10000;
  std::uint64_t seed = 1;
  int jobs = 1;
};
ExperimentReport lzsi_roundtrip_experiment(const PairModel& model, const LzsiRoundtripOpts& o);

struct LzsiRateOpts {
  int n = 256;
  std::int64_t samples = 4000;
  std::string method = "renewal";  // renewal | direct
  std::int64_t m = 1 << 20;        // direct only
  std::uint64_t seed = 1;
  int jobs = 1;
  double tol = 0.1;  // |mean log2(R)/n - h| tolerance
};
ExperimentReport lzsi_rate_experiment(const PairModel& model, const Rates& rates,
                                      const LzsiRateOpts& o);

// Exact Var[l(f*_n)] by per-y enumeration (dispersion reference at small n).
struct FstarMoments {
  double mean = 0, var = 0;
};
FstarMoments exact_fstar_moments(const PairModel& model, int n);

}  // namespace csi
