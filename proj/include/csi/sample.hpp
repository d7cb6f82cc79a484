#pragma once

#include <cstdint>
#include <vector>

#include "csi/model.hpp"
#include "csi/rng.hpp"

namespace csi {

// One two-sided stationary realization: m past symbols (positions -m+1..0)
// followed by n present symbols (positions 1..n). Stored oldest-first, so
// position p lives at index m - 1 + p.
struct TwoSidedSample {
  int m = 0, n = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint8_t> x, y, pair;  // each of length m + n

  int idx(int pos) const { return m - 1 + pos; }
  std::uint8_t x_at(int pos) const { return x[idx(pos)]; }
  std::uint8_t y_at(int pos) const { return y[idx(pos)]; }
  const std::uint8_t* present_x() const { return x.data() + m; }
  const std::uint8_t* present_y() const { return y.data() + m; }
  const std::uint8_t* present_pair() const { return pair.data() + m; }
};

// Single stationary forward path of length m + n; the present window is the
// tail. Deterministic in (model, m, n, seed, stream).
TwoSidedSample sample_two_sided(const PairModel& model, int m, int n, std::uint64_t seed,
                                std::uint64_t stream = 0);

// Draws only the present window (n symbols) from the stationary law.
void sample_present(const PairModel& model, int n, CounterRng& rng, std::vector<std::uint8_t>& pair_out);

// Lazily extends the past of a fixed present window, one symbol per step,
// using the reversed stationary chain. Exact: the conditional law of the
// past given the present depends on the present only through its leading
// history, whose posterior is computed up front.
class BackwardPastSampler {
 public:
  BackwardPastSampler(const PairModel& model, const std::uint8_t* present_pair, int n,
                      CounterRng rng);

  // pair symbol at position -d+1 for depth d >= 1 (d=1 is position 0)
  std::uint8_t pair_at_depth(int d);
  int depth() const { return static_cast<int>(past_.size()); }

 private:
  const PairModel& model_;
  CounterRng rng_;
  std::vector<std::uint8_t> past_;  // past_[d-1] = pair symbol at depth d
  int state_ = 0;                   // history state at the frontier (deepest revealed time)
  bool memoryless_ = false;
};

}  // namespace csi
