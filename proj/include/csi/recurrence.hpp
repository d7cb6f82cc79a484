#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "csi/model.hpp"
#include "csi/rng.hpp"
#include "csi/sample.hpp"

namespace csi {

// Match windows are drawn from the concatenated (past, present) sequence:
// the window at shift i >= 1 covers positions -i+1 .. -i+n and may overlap
// the present block. A buffer of past length m supports shifts up to m.
struct RecurrenceObservation {
  int n = 0;
  std::int64_t past_len = 0;          // m of the sample (0 = unbounded renewal past)
  std::int64_t r_joint = 0;           // R_n(x,y): first shift matching the pair window
  std::int64_t r_conditional = 0;     // R_n(x|y): index among y-matches
  std::int64_t y_matches_scanned = 0; // repeated y-recurrences inspected
  bool truncated = false;             // ran out of past before the match
};

// Shift of the j-th occurrence of the present y-window in the past
// (repeated recurrence time R_n^{(j)}(y)); 0 with truncated=true when fewer
// than j occurrences fit the buffer.
struct RepeatedRecurrence {
  std::int64_t shift = 0;
  bool truncated = false;
};
RepeatedRecurrence repeated_recurrence(const TwoSidedSample& s, std::int64_t j);

// R_n(x,y) by scanning the pair sequence.
RecurrenceObservation joint_recurrence(const TwoSidedSample& s);

// R_n(x|y): scans y-occurrences in increasing shift order and returns the
// index of the first whose aligned x-window matches. Also fills r_joint with
// the position of that occurrence, which must equal the pair-window scan
// (definitional identity, asserted in tests).
RecurrenceObservation conditional_recurrence(const TwoSidedSample& s);

// One conditional-recurrence draw with the present window held fixed: the
// past is sampled from its exact conditional law (history posterior plus the
// reversed stationary chain) and extended lazily until the pair window
// recurs or the shift cap m_cap is hit. Used by Kac experiments.
struct KacDraw {
  std::int64_t r = 0;            // R_n(x|y)
  std::int64_t joint_shift = 0;  // position of the matching occurrence
  bool truncated = false;
};
KacDraw conditional_recurrence_given_present(const PairModel& model, const std::uint8_t* pair,
                                             int n, std::int64_t m_cap, std::uint64_t seed,
                                             std::uint64_t replica);

// Exact-in-law sampler of (present, R_n(x|y)) that integrates out the
// unbounded past instead of materializing it. Valid for models whose kernel
// factorizes as P(x',y'|h) = P(y'|h-y-part) * Q(x'|y') (memoryless pairs and
// Markov-Y noise-channel models): conditioned on the y-path, the x-window at
// each y-occurrence is an independent product of Q terms, so beyond a
// literally-simulated boundary region the count of y-occurrences until the
// x-match is geometric with success probability P(x_1^n|y_1^n).
//
// Samples whose side-information string admits a short self-period make
// overlapping occurrences non-negligible; those fall back to a literal
// backward simulation (still exact), capped at fallback_cap shifts.
class RenewalRecurrenceSampler {
 public:
  RenewalRecurrenceSampler(const PairModel& model, int n);

  struct Draw {
    double log2_r = 0;            // log2 R_n(x|y)
    std::int64_t r_exact = 0;     // R if it fits in int64 (else 0)
    double density_bits = 0;      // d_n = -log2 P(x|y) of the drawn present
    bool exact_integer = false;
    bool fell_back = false;       // literal fallback path taken
    bool truncated = false;       // fallback hit its cap (excluded by callers)
    std::vector<std::uint8_t> present_pair;
  };
  Draw draw(std::uint64_t seed, std::uint64_t replica) const;

  static bool eligible(const PairModel& model);

 private:
  const PairModel& model_;
  int n_;
  std::unique_ptr<PairModel> y_model_;       // Y-marginal chain as a |X|=1 pair model
  std::vector<std::vector<double>> q_;       // Q(x|y)
  std::vector<std::vector<double>> q_cdf_;
  std::vector<double> log2_q_;               // flattened log2 Q(x|y)
  double beta_ = 1;                          // max Y transition probability
  std::int64_t fallback_cap_ = 1u << 26;
};

}  // namespace csi
