#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace csi {

// Error codes mirror the failure modes of model construction and the
// probability/coding operations built on top of it.
enum class Errc {
  RowSumError,
  NegativeProbability,
  NotIrreducible,
  BadSpec,
  ConditioningOnNull,
  EnumerationTooLarge,
  WindowTooShort,
  WrongKind,
  InvalidCodeword,
  TargetTooRare,
  DegenerateVariance,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

struct Alphabet {
  int size = 0;
  std::vector<std::string> names;  // optional display names

  std::string name(int sym) const {
    if (sym >= 0 && sym < static_cast<int>(names.size())) return names[sym];
    return std::to_string(sym);
  }
};

enum class ModelKind { Memoryless, Markov };

struct ModelValidity {
  bool irreducible = false;
  bool aperiodic = false;
  bool all_positive = false;
  char assumption_m_case = 'u';  // 'a', 'b', or 'u' (unknown)
};

// Description record for building a model; mirrors the JSON model file.
struct ModelSpec {
  int x_alphabet = 0;
  int y_alphabet = 0;
  int order = 0;
  std::vector<std::vector<double>> kernel;  // state_count rows x pair_count cols
  std::vector<std::string> x_names, y_names;
};

// Finite-alphabet source/side-information pair process.
//
// The pair symbol c = x * |Y| + y. For order k >= 1, a state is the history
// of the last k pair symbols encoded base |X||Y| with the most recent symbol
// in the least significant digit. Memoryless models have a single state.
//
// Immutable after build; safe to share across threads.
class PairModel {
 public:
  static PairModel build(const ModelSpec& spec);
  static PairModel from_json_text(const std::string& text);
  static PairModel load_file(const std::string& path);

  std::string to_json_text() const;

  const Alphabet& x_alphabet() const { return x_; }
  const Alphabet& y_alphabet() const { return y_; }
  ModelKind kind() const { return order_ == 0 ? ModelKind::Memoryless : ModelKind::Markov; }
  int order() const { return order_; }
  int pair_count() const { return pair_count_; }
  int state_count() const { return state_count_; }

  int pair_symbol(int x, int y) const { return x * y_.size + y; }
  int x_of(int c) const { return c / y_.size; }
  int y_of(int c) const { return c % y_.size; }
  int shift_state(int s, int c) const {
    return order_ == 0 ? 0 : (s * pair_count_ + c) % state_count_;
  }
  // pair symbol at history depth d in [1, order]: d=1 is the most recent
  int state_symbol(int s, int d) const;

  double kernel(int s, int c) const { return kernel_[static_cast<std::size_t>(s) * pair_count_ + c]; }
  // log2 of kernel entry (bits); -inf for zero entries
  double log2_kernel(int s, int c) const {
    return log2_kernel_[static_cast<std::size_t>(s) * pair_count_ + c];
  }
  const std::vector<double>& stationary() const { return stationary_; }
  double stationary(int s) const { return stationary_[s]; }

  const ModelValidity& validity() const { return validity_; }
  bool all_positive() const { return validity_.all_positive; }

  // Sample a pair symbol from state s. Deterministic given the rng state.
  template <typename Rng>
  int sample_symbol(int s, Rng& rng) const {
    const double u = rng.next_double();
    const double* cdf = &kernel_cdf_[static_cast<std::size_t>(s) * pair_count_];
    int c = 0;
    while (c + 1 < pair_count_ && u >= cdf[c]) ++c;
    return c;
  }
  // Sample a state from the stationary law.
  template <typename Rng>
  int sample_stationary_state(Rng& rng) const {
    const double u = rng.next_double();
    int s = 0;
    while (s + 1 < state_count_ && u >= stationary_cdf_[s]) ++s;
    return s;
  }

  // Y-marginal kernel over y-histories if the Y process is exactly Markov of
  // order <= k (the kernel columns P(y'|history) must not depend on the
  // x-part of the history, tolerance 1e-12). Empty optional-like flag
  // otherwise: the Y process is then hidden-Markov.
  struct YMarginal {
    bool is_markov = false;
    int order = 0;
    std::vector<std::vector<double>> kernel;  // |Y|^order rows, |Y| cols
  };
  YMarginal marginal_y_model() const;

  // True when the kernel factorizes as P(x',y'|h) = P(y'|h) * Q(x'|y') with Q
  // independent of the history (tolerance 1e-12). Such models admit the
  // renewal-based recurrence sampler.
  struct NoiseChannel {
    bool applies = false;
    std::vector<std::vector<double>> q;  // |Y| rows: Q(x|y)
  };
  NoiseChannel noise_channel() const;

  // Backward step of the stationary history chain: predecessor states of s
  // are e * B^{k-1} + (s / B) for e in [0, B); reversed transition
  // probabilities are pi(p) * K(p, c) / pi(s) with c the most recent symbol
  // of s. Samples a predecessor; also reports the pair symbol that leaves
  // the history (depth k of p), i.e. the newly revealed past symbol.
  template <typename Rng>
  int sample_predecessor(int s, Rng& rng, int* revealed_symbol) const {
    const double u = rng.next_double() * reversed_norm_[s];
    const int c = s % pair_count_;  // most recent symbol of s
    const int base = s / pair_count_;
    double acc = 0;
    int e = 0;
    for (; e < pair_count_; ++e) {
      const int p = e * top_digit_weight_ + base;
      acc += stationary_[p] * kernel(p, c);
      if (u < acc) break;
    }
    if (e == pair_count_) e = pair_count_ - 1;
    const int p = e * top_digit_weight_ + base;
    if (revealed_symbol) *revealed_symbol = state_symbol(p, order_);
    return p;
  }

  // 64-bit FNV-1a hash of the canonical model serialization.
  std::uint64_t hash() const;

  friend ModelValidity check_validity(const PairModel& m);

 private:
  PairModel() = default;
  void compute_stationary();
  void compute_validity();

  Alphabet x_, y_;
  int order_ = 0;
  int pair_count_ = 0;
  int state_count_ = 1;
  int top_digit_weight_ = 1;  // B^{k-1}
  std::vector<double> kernel_, log2_kernel_, kernel_cdf_;
  std::vector<double> stationary_, stationary_cdf_, reversed_norm_;
  ModelValidity validity_;
};

// Full Assumption (M) classification. Case 'a' when every kernel entry is
// positive. Case 'b' when the pair chain and the Y-marginal chain are both
// Markov, irreducible and aperiodic. Otherwise 'u': the mixing-coefficient
// route (case c) cannot be certified from a finite spec.
ModelValidity check_validity(const PairModel& m);

}  // namespace csi
