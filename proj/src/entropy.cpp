#include "csi/entropy.hpp"

#include <cmath>
#include <vector>

#include "csi/density.hpp"
#include "csi/kernels.hpp"
#include "csi/parallel.hpp"
#include "csi/rng.hpp"
#include "csi/sample.hpp"

namespace csi {

namespace {

double ipow_check(int base, int n, double limit) {
  double v = 1;
  for (int i = 0; i < n; ++i) {
    v *= base;
    if (v > limit) return v;
  }
  return v;
}

}  // namespace

ExactBlockStats exact_block_stats(const PairModel& model, int n) {
  if (n < 1) throw Error(Errc::BadSpec, "n must be >= 1");
  if (ipow_check(model.pair_count(), n, 1e7) > 1e7)
    throw Error(Errc::EnumerationTooLarge, "(|X||Y|)^n exceeds the 1e7 enumeration guard");

  const int S = model.state_count();
  const int X = model.x_alphabet().size;
  const int Y = model.y_alphabet().size;

  // per-level scratch: unnormalized weights over histories for the pair
  // prefix and for its y-projection
  std::vector<std::vector<double>> wj(n + 1), wy(n + 1), wyx(n + 1);
  for (int l = 0; l <= n; ++l) {
    wj[l].assign(S, 0.0);
    wy[l].assign(S, 0.0);
    wyx[l].assign(S, 0.0);
  }
  if (model.order() == 0) {
    wj[0][0] = wy[0][0] = 1.0;
  } else {
    wj[0] = model.stationary();
    wy[0] = model.stationary();
  }

  ExactBlockStats out;
  out.n = n;
  double e_d = 0, e_d2 = 0, h_joint = 0, h_y = 0;

  // depth-first over (y, x) choices per level; the filter update is shared
  // across the X siblings of a y-branch
  struct Frame {
    int y = 0, x = 0;
    bool y_ready = false;
  };
  std::vector<Frame> stack(n);
  int level = 0;
  stack[0] = {};
  while (level >= 0) {
    Frame& fr = stack[level];
    if (fr.y == Y) {
      --level;
      if (level >= 0) {
        Frame& up = stack[level];
        ++up.x;
        if (up.x == X) {
          up.x = 0;
          up.y_ready = false;
          ++up.y;
        }
      }
      continue;
    }
    if (!fr.y_ready) {
      // advance the y-filter for this y choice
      auto& src = wy[level];
      auto& dst = wy[level + 1];
      std::fill(dst.begin(), dst.end(), 0.0);
      double mass = 0;
      for (int s = 0; s < S; ++s) {
        const double ws = src[s];
        if (ws == 0) continue;
        for (int x = 0; x < X; ++x) {
          const int c = model.pair_symbol(x, fr.y);
          const double p = ws * model.kernel(s, c);
          if (p == 0) continue;
          dst[model.shift_state(s, c)] += p;
          mass += p;
        }
      }
      fr.y_ready = true;
      if (mass == 0) {  // no continuation of this y-prefix
        fr.y_ready = false;
        ++fr.y;
        continue;
      }
      if (level + 1 == n) h_y -= mass * std::log2(mass);
    }
    // advance the joint for (x, y)
    {
      const int c = model.pair_symbol(fr.x, fr.y);
      auto& src = wj[level];
      auto& dst = wj[level + 1];
      std::fill(dst.begin(), dst.end(), 0.0);
      double mass = 0;
      for (int s = 0; s < S; ++s) {
        const double ws = src[s];
        if (ws == 0) continue;
        const double p = ws * model.kernel(s, c);
        if (p == 0) continue;
        dst[model.shift_state(s, c)] += p;
        mass += p;
      }
      if (mass > 0) {
        if (level + 1 == n) {
          const double py = [&] {
            double z = 0;
            for (double v : wy[level + 1]) z += v;
            return z;
          }();
          const double pj = mass;
          const double d = std::log2(py) - std::log2(pj);
          h_joint -= pj * std::log2(pj);
          e_d += pj * d;
          e_d2 += pj * d * d;
        } else {
          ++level;
          stack[level] = {};
          continue;
        }
      }
    }
    ++fr.x;
    if (fr.x == X) {
      fr.x = 0;
      fr.y_ready = false;
      ++fr.y;
    }
  }

  out.h_joint_bits = h_joint;
  out.h_y_bits = h_y;
  out.h_cond_bits = e_d;
  out.var_d_bits2 = e_d2 - e_d * e_d;
  return out;
}

RateEstimate conditional_entropy_exact(const PairModel& model, int n) {
  const auto st = exact_block_stats(model, n);
  RateEstimate r;
  r.value = st.h_cond_bits;
  r.method = "exact_enum";
  r.n_used = n;
  return r;
}

namespace {

// d_n for one seeded replica (stationary start, present only)
double sample_density(const PairModel& model, int n, std::uint64_t seed, std::uint64_t replica) {
  CounterRng rng(seed, replica);
  DensityStepper ds(model);
  int state = model.sample_stationary_state(rng);
  for (int t = 0; t < n; ++t) {
    const int c = model.sample_symbol(state, rng);
    state = model.shift_state(state, c);
    ds.step(c);
  }
  return ds.density_bits();
}

}  // namespace

RateEstimate conditional_entropy_mc(const PairModel& model, int n, std::int64_t samples,
                                    std::uint64_t seed, int jobs) {
  if (samples < 2) throw Error(Errc::BadSpec, "samples must be >= 2");
  std::vector<double> d(samples);
  parallel_replicas(samples, jobs,
                    [&](std::int64_t r) { d[r] = sample_density(model, n, seed, r); });
  const double mean = kern::block_sum(d.data(), d.size()) / samples;
  const double ss = kern::block_sumsqdev(d.data(), d.size(), mean);
  RateEstimate r;
  r.value = mean;
  r.stderr_ = std::sqrt(ss / (samples - 1) / samples);
  r.method = "mc_direct";
  r.n_used = n;
  r.samples_used = samples;
  return r;
}

RateEstimate varentropy_direct(const PairModel& model, int n, std::int64_t samples,
                               std::uint64_t seed, int jobs) {
  if (samples < 2) throw Error(Errc::BadSpec, "samples must be >= 2");
  std::vector<double> d(samples);
  parallel_replicas(samples, jobs,
                    [&](std::int64_t r) { d[r] = sample_density(model, n, seed, r); });
  const double mean = kern::block_sum(d.data(), d.size()) / samples;
  const double var = kern::block_sumsqdev(d.data(), d.size(), mean) / (samples - 1);
  // stderr of the variance estimate from the fourth central moment
  double m4 = 0;
  for (double v : d) {
    const double dd = v - mean;
    m4 += dd * dd * dd * dd;
  }
  m4 /= samples;
  const double var_of_var =
      (m4 - var * var * (samples - 3.0) / (samples - 1.0)) / samples;
  RateEstimate r;
  r.value = var / n;
  r.stderr_ = std::sqrt(std::max(0.0, var_of_var)) / n;
  r.method = "mc_direct";
  r.n_used = n;
  r.samples_used = samples;
  return r;
}

RateEstimate varentropy_exact_diff(const PairModel& model, int n) {
  if (n < 2) throw Error(Errc::BadSpec, "n must be >= 2 for the difference route");
  const auto a = exact_block_stats(model, n);
  const auto b = exact_block_stats(model, n - 1);
  RateEstimate r;
  r.value = a.var_d_bits2 - b.var_d_bits2;
  r.method = "exact_enum";
  r.n_used = n;
  return r;
}

RateEstimate varentropy_series(const PairModel& model, std::int64_t paths, int path_len,
                               int max_lag, int window, std::uint64_t seed, int jobs) {
  if (paths < 2) throw Error(Errc::BadSpec, "paths must be >= 2");
  if (path_len < 2 * max_lag + window)
    throw Error(Errc::WindowTooShort, "path_len must be >= 2*max_lag + window");
  const int T = path_len;
  std::vector<std::vector<double>> f(paths);
  parallel_replicas(paths, jobs, [&](std::int64_t p) {
    const auto s = sample_two_sided(model, window, T, seed, static_cast<std::uint64_t>(p));
    f[p] = per_symbol_density_terms(model, s, window);
  });
  // pooled mean, then per-path series estimates
  double tot = 0;
  for (const auto& fp : f) tot += kern::block_sum(fp.data(), fp.size());
  const double mu = tot / (static_cast<double>(paths) * T);
  std::vector<double> est(paths);
  double tail = 0;
  for (std::int64_t p = 0; p < paths; ++p) {
    std::vector<double> g(T);
    for (int j = 0; j < T; ++j) g[j] = f[p][j] - mu;
    double sigma2 = kern::block_dot(g.data(), g.data(), T) / T;
    double cl = 0;
    for (int k = 1; k <= max_lag; ++k) {
      const double ck = kern::block_dot(g.data(), g.data() + k, T - k) / (T - k);
      sigma2 += 2 * ck;
      if (k == max_lag) cl = ck;
    }
    est[p] = sigma2;
    tail += std::abs(cl);
  }
  const double mean = kern::block_sum(est.data(), est.size()) / paths;
  const double sd = std::sqrt(kern::block_sumsqdev(est.data(), est.size(), mean) / (paths - 1));
  RateEstimate r;
  r.value = mean;
  r.stderr_ = sd / std::sqrt(static_cast<double>(paths));
  r.method = "series";
  r.n_used = T;
  r.samples_used = paths;
  r.truncation_lag = max_lag;
  r.tail_diag = tail / paths;
  return r;
}

MemorylessRates memoryless_analytic(const PairModel& model) {
  if (model.kind() != ModelKind::Memoryless)
    throw Error(Errc::WrongKind, "analytic route requires a memoryless model");
  const int X = model.x_alphabet().size, Y = model.y_alphabet().size;
  MemorylessRates out;
  double e = 0, e2 = 0;
  for (int y = 0; y < Y; ++y) {
    double py = 0;
    for (int x = 0; x < X; ++x) py += model.kernel(0, model.pair_symbol(x, y));
    if (py == 0) continue;
    for (int x = 0; x < X; ++x) {
      const double pxy = model.kernel(0, model.pair_symbol(x, y));
      if (pxy == 0) continue;
      const double d = std::log2(py) - std::log2(pxy);  // -log2 P(x|y)
      e += pxy * d;
      e2 += pxy * d * d;
    }
  }
  out.h_bits = e;
  out.varentropy_bits2 = e2 - e * e;
  return out;
}

RatePair estimate_rates(const PairModel& model, std::uint64_t seed, int jobs) {
  RatePair out;
  if (model.kind() == ModelKind::Memoryless) {
    const auto a = memoryless_analytic(model);
    out.h.value = a.h_bits;
    out.h.method = "analytic_memoryless";
    out.h.n_used = 1;
    out.sigma2.value = a.varentropy_bits2;
    out.sigma2.method = "analytic_memoryless";
    out.sigma2.n_used = 1;
    return out;
  }
  // largest n with (|X||Y|)^n within the enumeration guard
  int n = 1;
  double v = model.pair_count();
  while (v * model.pair_count() <= 1e7 && n < 24) {
    v *= model.pair_count();
    ++n;
  }
  if (n >= 2) {
    const auto a = exact_block_stats(model, n);
    const auto b = exact_block_stats(model, n - 1);
    out.h.value = a.h_cond_bits - b.h_cond_bits;
    out.h.method = "exact_enum";
    out.h.n_used = n;
    out.sigma2.value = a.var_d_bits2 - b.var_d_bits2;
    out.sigma2.method = "exact_enum";
    out.sigma2.n_used = n;
  } else {
    const auto h = conditional_entropy_mc(model, 2048, 20000, seed, jobs);
    out.h.value = h.value / 2048;
    out.h.method = "mc_direct";
    out.h.n_used = 2048;
    out.h.samples_used = h.samples_used;
    out.h.stderr_ = h.stderr_ / 2048;
    out.sigma2 = varentropy_direct(model, 1024, 20000, seed + 1, jobs);
  }
  return out;
}

}  // namespace csi
