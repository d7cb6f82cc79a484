#include "csi/recurrence.hpp"

#include <cmath>
#include <cstring>

#include "csi/density.hpp"
#include "csi/kernels.hpp"

namespace csi {

namespace {

// highest buffer start index for pattern matches = smallest shift i (shift
// i maps to start index m - i)
std::size_t start_of_shift(const TwoSidedSample& s, std::int64_t i) {
  return static_cast<std::size_t>(s.m - i);
}

}  // namespace

RepeatedRecurrence repeated_recurrence(const TwoSidedSample& s, std::int64_t j) {
  if (j < 1) throw Error(Errc::BadSpec, "occurrence index j must be >= 1");
  if (s.m < 1 || s.m < s.n - 0) {
    // shifts exist only up to m; a tiny past may still hold straddle windows
  }
  RepeatedRecurrence out;
  const std::uint8_t* pat = s.present_y();
  std::int64_t found = 0;
  std::size_t start = static_cast<std::size_t>(s.m - 1);
  if (s.m < 1) {
    out.truncated = true;
    return out;
  }
  for (;;) {
    const std::size_t hit = kern::find_match_desc(s.y.data(), start, pat, s.n);
    if (hit == kern::npos) {
      out.truncated = true;
      return out;
    }
    if (++found == j) {
      out.shift = s.m - static_cast<std::int64_t>(hit);
      return out;
    }
    if (hit == 0) {
      out.truncated = true;
      return out;
    }
    start = hit - 1;
  }
}

RecurrenceObservation joint_recurrence(const TwoSidedSample& s) {
  RecurrenceObservation out;
  out.n = s.n;
  out.past_len = s.m;
  if (s.m < 1) {
    out.truncated = true;
    return out;
  }
  const std::size_t hit =
      kern::find_match_desc(s.pair.data(), static_cast<std::size_t>(s.m - 1), s.present_pair(), s.n);
  if (hit == kern::npos) {
    out.truncated = true;
    return out;
  }
  out.r_joint = s.m - static_cast<std::int64_t>(hit);
  return out;
}

RecurrenceObservation conditional_recurrence(const TwoSidedSample& s) {
  RecurrenceObservation out;
  out.n = s.n;
  out.past_len = s.m;
  if (s.m < 1) {
    out.truncated = true;
    return out;
  }
  const std::uint8_t* ypat = s.present_y();
  const std::uint8_t* xpat = s.present_x();
  std::size_t start = static_cast<std::size_t>(s.m - 1);
  for (;;) {
    const std::size_t hit = kern::find_match_desc(s.y.data(), start, ypat, s.n);
    if (hit == kern::npos) {
      out.truncated = true;
      return out;
    }
    ++out.y_matches_scanned;
    if (std::memcmp(s.x.data() + hit, xpat, s.n) == 0) {
      out.r_conditional = out.y_matches_scanned;
      out.r_joint = s.m - static_cast<std::int64_t>(hit);
      return out;
    }
    if (hit == 0) {
      out.truncated = true;
      return out;
    }
    start = hit - 1;
  }
}

KacDraw conditional_recurrence_given_present(const PairModel& model, const std::uint8_t* pair,
                                             int n, std::int64_t m_cap, std::uint64_t seed,
                                             std::uint64_t replica) {
  KacDraw out;
  BackwardPastSampler past(model, pair, n, CounterRng(seed, replica));
  std::vector<std::uint8_t> rev;  // revealed past pair symbols, index d-1 = depth d
  rev.reserve(64);
  auto pair_at = [&](std::int64_t pos) -> std::uint8_t {
    if (pos >= 1) return pair[pos - 1];
    const std::int64_t d = 1 - pos;
    while (static_cast<std::int64_t>(rev.size()) < d)
      rev.push_back(past.pair_at_depth(static_cast<int>(rev.size()) + 1));
    return rev[static_cast<std::size_t>(d - 1)];
  };
  const int Y = model.y_alphabet().size;
  auto y_of = [&](std::uint8_t c) { return c % Y; };
  std::int64_t y_matches = 0;
  for (std::int64_t i = 1; i <= m_cap; ++i) {
    bool ymatch = true;
    for (int j = n; j >= 1 && ymatch; --j)
      ymatch = y_of(pair_at(-i + j)) == y_of(pair[j - 1]);
    if (!ymatch) continue;
    ++y_matches;
    bool full = true;
    for (int j = n; j >= 1 && full; --j) full = pair_at(-i + j) == pair[j - 1];
    if (full) {
      out.r = y_matches;
      out.joint_shift = i;
      return out;
    }
  }
  out.truncated = true;
  return out;
}

// ---------------------------------------------------------------------------
// Renewal sampler
// ---------------------------------------------------------------------------

bool RenewalRecurrenceSampler::eligible(const PairModel& model) {
  return model.noise_channel().applies && model.marginal_y_model().is_markov;
}

RenewalRecurrenceSampler::RenewalRecurrenceSampler(const PairModel& model, int n)
    : model_(model), n_(n) {
  if (!eligible(model))
    throw Error(Errc::WrongKind,
                "renewal recurrence sampling requires a Markov-Y noise-channel model");
  const auto nc = model.noise_channel();
  q_ = nc.q;
  const int X = model.x_alphabet().size, Y = model.y_alphabet().size;
  q_cdf_.assign(Y, std::vector<double>(X, 0.0));
  log2_q_.assign(static_cast<std::size_t>(Y) * X, -kInf);
  for (int y = 0; y < Y; ++y) {
    double acc = 0;
    for (int x = 0; x < X; ++x) {
      acc += q_[y][x];
      q_cdf_[y][x] = acc;
      if (q_[y][x] > 0) log2_q_[static_cast<std::size_t>(y) * X + x] = std::log2(q_[y][x]);
    }
  }
  const auto ym = model.marginal_y_model();
  ModelSpec spec;
  spec.x_alphabet = 1;
  spec.y_alphabet = Y;
  spec.order = ym.order;
  spec.kernel = ym.kernel;
  y_model_ = std::make_unique<PairModel>(PairModel::build(spec));
  beta_ = 0;
  for (const auto& row : ym.kernel)
    for (double v : row) beta_ = std::max(beta_, v);
}

RenewalRecurrenceSampler::Draw RenewalRecurrenceSampler::draw(std::uint64_t seed,
                                                              std::uint64_t replica) const {
  Draw out;
  CounterRng rng(seed, replica);
  const int n = n_;
  const int X = model_.x_alphabet().size;

  // present window from the stationary law
  sample_present(model_, n, rng, out.present_pair);
  std::vector<std::uint8_t> xs(n), ys(n);
  double log2p = 0;
  for (int i = 0; i < n; ++i) {
    xs[i] = static_cast<std::uint8_t>(model_.x_of(out.present_pair[i]));
    ys[i] = static_cast<std::uint8_t>(model_.y_of(out.present_pair[i]));
    log2p += log2_q_[static_cast<std::size_t>(ys[i]) * X + xs[i]];
  }
  const double p = std::exp2(log2p);
  out.density_bits = -log2p;

  // backward y-past conditioned on the present y-string; x-past revealed
  // alongside as independent Q draws (noise-channel structure)
  BackwardPastSampler ypast(*y_model_, ys.data(), n, CounterRng(rng.next_u64(), 1));
  CounterRng xrng(rng.next_u64(), 2);
  CounterRng grng(rng.next_u64(), 3);
  std::vector<std::uint8_t> py, px;  // revealed past, index d-1 = depth d
  auto extend_to = [&](std::int64_t depth) {
    while (static_cast<std::int64_t>(py.size()) < depth) {
      const int d = static_cast<int>(py.size()) + 1;
      const std::uint8_t yv = ypast.pair_at_depth(d);  // |X|=1 model: pair symbol == y
      py.push_back(yv);
      const double u = xrng.next_double();
      const auto& cdf = q_cdf_[yv];
      int x = 0;
      while (x + 1 < X && u >= cdf[x]) ++x;
      px.push_back(static_cast<std::uint8_t>(x));
    }
  };
  auto y_at = [&](std::int64_t pos) -> std::uint8_t {
    return pos >= 1 ? ys[pos - 1] : py[static_cast<std::size_t>(-pos)];
  };
  auto x_at = [&](std::int64_t pos) -> std::uint8_t {
    return pos >= 1 ? xs[pos - 1] : px[static_cast<std::size_t>(-pos)];
  };
  auto window_y_match = [&](std::int64_t i) {
    for (int j = n; j >= 1; --j)
      if (y_at(-i + j) != ys[j - 1]) return false;
    return true;
  };
  auto window_x_match = [&](std::int64_t i) {
    for (int j = n; j >= 1; --j)
      if (x_at(-i + j) != xs[j - 1]) return false;
    return true;
  };

  // period structure of the present y decides whether occurrences can
  // overlap; a conservative bound on the per-occurrence overlap probability
  double q_ov = 0;
  for (int g = 1; g < n; ++g) {
    bool period = true;
    for (int j = 0; j + g < n && period; ++j) period = ys[j] == ys[j + g];
    if (period) q_ov += std::pow(beta_, g);
  }
  const bool use_fallback = q_ov > 0 && q_ov > 0x1.0p-20 * p;

  std::int64_t m1 = 0;  // y-occurrences inspected whose x-window failed
  std::int64_t i = 1;
  const std::int64_t literal_limit = use_fallback ? fallback_cap_ : 64LL * n;
  for (; i <= literal_limit; ++i) {
    extend_to(i);
    if (window_y_match(i)) {
      ++m1;
      if (window_x_match(i)) {
        out.r_exact = m1;
        out.log2_r = std::log2(static_cast<double>(m1));
        out.exact_integer = true;
        out.fell_back = use_fallback;
        return out;
      }
      continue;
    }
    if (!use_fallback && i >= n) {
      // stop once no partially revealed window can still complete
      bool alive = false;
      for (std::int64_t ii = i + 1; ii < i + n && !alive; ++ii) {
        bool ok = true;
        for (std::int64_t d = ii - n + 1; d <= i && ok; ++d)
          ok = y_at(1 - d) == ys[ii - d];  // depth d is position 1-d
        alive = ok;
      }
      if (!alive) break;
    }
  }
  if (use_fallback) {
    out.fell_back = true;
    out.truncated = true;  // literal cap reached
    return out;
  }
  if (i > literal_limit) {
    // pathological partial-match chatter; treat as fallback truncation
    out.fell_back = true;
    out.truncated = true;
    return out;
  }

  // beyond the boundary every y-occurrence carries an independent
  // Bernoulli(p) x-match: geometric skip-ahead
  const double u = grng.next_double_pos();
  if (p > 1e-300) {
    const double g = std::ceil(std::log(u) / std::log1p(-p));
    const double r = static_cast<double>(m1) + std::max(1.0, g);
    out.log2_r = std::log2(r);
    if (r <= 0x1.0p53) {
      out.r_exact = static_cast<std::int64_t>(r);
      out.exact_integer = true;
    }
  } else {
    // log-domain: log2 G = d + log2(-ln U)
    out.log2_r = out.density_bits + std::log2(-std::log(u));
  }
  return out;
}

}  // namespace csi
