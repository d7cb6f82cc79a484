#include "csi/sample.hpp"

#include <cmath>

namespace csi {

TwoSidedSample sample_two_sided(const PairModel& model, int m, int n, std::uint64_t seed,
                                std::uint64_t stream) {
  if (m < model.order()) throw Error(Errc::BadSpec, "past length m must be >= model order");
  if (n < 1) throw Error(Errc::BadSpec, "present length n must be >= 1");
  TwoSidedSample s;
  s.m = m;
  s.n = n;
  s.seed = seed;
  const int len = m + n;
  s.x.resize(len);
  s.y.resize(len);
  s.pair.resize(len);
  CounterRng rng(seed, stream);
  int state = model.sample_stationary_state(rng);
  for (int i = 0; i < len; ++i) {
    const int c = model.sample_symbol(state, rng);
    s.pair[i] = static_cast<std::uint8_t>(c);
    s.x[i] = static_cast<std::uint8_t>(model.x_of(c));
    s.y[i] = static_cast<std::uint8_t>(model.y_of(c));
    state = model.shift_state(state, c);
  }
  return s;
}

void sample_present(const PairModel& model, int n, CounterRng& rng,
                    std::vector<std::uint8_t>& pair_out) {
  pair_out.resize(n);
  int state = model.sample_stationary_state(rng);
  for (int i = 0; i < n; ++i) {
    const int c = model.sample_symbol(state, rng);
    pair_out[i] = static_cast<std::uint8_t>(c);
    state = model.shift_state(state, c);
  }
}

BackwardPastSampler::BackwardPastSampler(const PairModel& model,
                                         const std::uint8_t* present_pair, int n, CounterRng rng)
    : model_(model), rng_(rng), memoryless_(model.order() == 0) {
  if (memoryless_) return;
  const int k = model.order();
  const int S = model.state_count();
  // posterior over the history preceding position 1, given the present
  std::vector<double> post(S);
  double tot = 0;
  const int steps = std::min(k, n);
  for (int h = 0; h < S; ++h) {
    double w = model.stationary(h);
    int st = h;
    for (int t = 0; t < steps && w > 0; ++t) {
      const int c = present_pair[t];
      w *= model.kernel(st, c);
      st = model.shift_state(st, c);
    }
    post[h] = w;
    tot += w;
  }
  if (tot <= 0) throw Error(Errc::TargetTooRare, "present window has probability 0");
  double u = rng_.next_double() * tot;
  int h = 0;
  double acc = 0;
  for (; h < S; ++h) {
    acc += post[h];
    if (u < acc) break;
  }
  if (h == S) h = S - 1;
  state_ = h;
  past_.resize(k);
  for (int d = 1; d <= k; ++d) past_[d - 1] = static_cast<std::uint8_t>(model.state_symbol(h, d));
}

std::uint8_t BackwardPastSampler::pair_at_depth(int d) {
  while (static_cast<int>(past_.size()) < d) {
    if (memoryless_) {
      past_.push_back(static_cast<std::uint8_t>(model_.sample_symbol(0, rng_)));
    } else {
      int revealed = 0;
      state_ = model_.sample_predecessor(state_, rng_, &revealed);
      past_.push_back(static_cast<std::uint8_t>(revealed));
    }
  }
  return past_[d - 1];
}

}  // namespace csi
