#include "csi/coder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "csi/density.hpp"

namespace csi {

Codeword codeword_for_rank(std::uint64_t rank) {
  if (rank < 1) throw Error(Errc::BadSpec, "rank must be >= 1");
  Codeword cw;
  cw.rank = rank;
  cw.length = std::bit_width(rank) - 1;
  cw.bits.resize(cw.length);
  for (int i = 0; i < cw.length; ++i)
    cw.bits[i] = (rank >> (cw.length - 1 - i)) & 1 ? '1' : '0';
  return cw;
}

std::uint32_t lex_index(const PairModel& model, const std::uint8_t* x, int n) {
  const int X = model.x_alphabet().size;
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v = v * X + x[i];
  return static_cast<std::uint32_t>(v);
}

std::vector<std::uint8_t> lex_string(const PairModel& model, std::uint32_t index, int n) {
  const int X = model.x_alphabet().size;
  std::vector<std::uint8_t> x(n);
  std::uint64_t v = index;
  for (int i = n - 1; i >= 0; --i) {
    x[i] = static_cast<std::uint8_t>(v % X);
    v /= X;
  }
  return x;
}

namespace {

std::uint64_t pow_guard(int base, int n) {
  double v = 1;
  std::uint64_t r = 1;
  for (int i = 0; i < n; ++i) {
    v *= base;
    if (v > 1e7) throw Error(Errc::EnumerationTooLarge, "|X|^n exceeds the 1e7 guard");
    r *= static_cast<std::uint64_t>(base);
  }
  return r;
}

// log2 P(x_1^n, y_1^n) for every x (lex order), y fixed
std::vector<double> joint_table(const PairModel& model, const std::uint8_t* y, int n) {
  const std::uint64_t total = pow_guard(model.x_alphabet().size, n);
  const int S = model.state_count();
  const int X = model.x_alphabet().size;
  std::vector<double> out(total);
  // DFS over x choices; weights over histories per level
  std::vector<std::vector<double>> w(n + 1);
  for (int l = 0; l <= n; ++l) w[l].assign(S, 0.0);
  if (model.order() == 0)
    w[0][0] = 1.0;
  else
    w[0] = model.stationary();
  std::vector<int> xs(n, 0);
  int level = 0;
  std::uint64_t idx = 0;
  while (level >= 0) {
    if (xs[level] == X) {
      xs[level] = 0;
      --level;
      if (level >= 0) ++xs[level];
      continue;
    }
    const int c = model.pair_symbol(xs[level], y[level]);
    auto& src = w[level];
    auto& dst = w[level + 1];
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
    if (level + 1 == n) {
      out[idx++] = mass > 0 ? std::log2(mass) : -kInf;
      ++xs[level];
    } else if (mass == 0) {
      // whole subtree has zero probability
      std::uint64_t skip = 1;
      for (int l = level + 1; l < n; ++l) skip *= X;
      for (std::uint64_t i = 0; i < skip; ++i) out[idx++] = -kInf;
      ++xs[level];
    } else {
      ++level;
    }
  }
  return out;
}

}  // namespace

CodeAssignment build_assignment(const PairModel& model, const std::uint8_t* y, int n) {
  CodeAssignment a;
  a.n = n;
  a.y.assign(y, y + n);
  a.y_log2 = y_marginal_log_prob(model, y, n);
  if (a.y_log2 == -kInf)
    throw Error(Errc::ConditioningOnNull, "side-information string has probability 0");
  auto joint = joint_table(model, y, n);
  const std::uint32_t total = static_cast<std::uint32_t>(joint.size());
  a.cond_log2.resize(total);
  for (std::uint32_t i = 0; i < total; ++i)
    a.cond_log2[i] = joint[i] == -kInf ? -kInf : joint[i] - a.y_log2;
  a.ranking.resize(total);
  std::iota(a.ranking.begin(), a.ranking.end(), 0u);
  std::stable_sort(a.ranking.begin(), a.ranking.end(), [&](std::uint32_t l, std::uint32_t r) {
    return a.cond_log2[l] > a.cond_log2[r];  // stable: lex ties keep lex order
  });
  a.rank_of.resize(total);
  for (std::uint32_t r = 0; r < total; ++r) a.rank_of[a.ranking[r]] = r;
  return a;
}

Codeword encode_opt(const CodeAssignment& a, const PairModel& model, const std::uint8_t* x) {
  return codeword_for_rank(a.rank_of[lex_index(model, x, a.n)] + 1ull);
}

std::vector<std::uint8_t> decode_opt(const CodeAssignment& a, const PairModel& model,
                                     const std::string& bits) {
  std::uint64_t rank = 1;
  for (char b : bits) {
    if (b != '0' && b != '1') throw Error(Errc::InvalidCodeword, "codeword must be binary");
    rank = (rank << 1) | static_cast<std::uint64_t>(b == '1');
  }
  if (rank > a.ranking.size())
    throw Error(Errc::InvalidCodeword, "codeword rank exceeds |X|^n");
  return lex_string(model, a.ranking[rank - 1], a.n);
}

Codeword encode_opt(const PairModel& model, const std::uint8_t* x, const std::uint8_t* y, int n) {
  return encode_opt(build_assignment(model, y, n), model, x);
}

std::vector<std::uint8_t> decode_opt(const PairModel& model, const std::string& bits,
                                     const std::uint8_t* y, int n) {
  return decode_opt(build_assignment(model, y, n), model, bits);
}

int optimal_codelength(const PairModel& model, const std::uint8_t* x, const std::uint8_t* y,
                       int n) {
  auto joint = joint_table(model, y, n);
  const std::uint32_t me = lex_index(model, x, n);
  const double mine = joint[me];
  if (mine == -kInf) {
    // ranked after all positive-probability strings; ties break by lex index
    std::uint64_t rank = 0;
    for (std::uint32_t i = 0; i < joint.size(); ++i)
      if (joint[i] > -kInf || i <= me) ++rank;
    return std::bit_width(rank) - 1;
  }
  std::uint64_t rank = 0;
  for (std::uint32_t i = 0; i < joint.size(); ++i) {
    if (joint[i] > mine) ++rank;
    else if (joint[i] == mine && i <= me) ++rank;
  }
  return std::bit_width(rank) - 1;
}

std::int64_t prefix_length_from_density(double density_bits) {
  if (density_bits == kInf)
    throw Error(Errc::BadSpec, "prefix length undefined for probability-0 string");
  const double r = std::round(density_bits);
  if (std::abs(density_bits - r) < 1e-9) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::ceil(density_bits));
}

std::int64_t prefix_codelength(const PairModel& model, const std::uint8_t* x,
                               const std::uint8_t* y, int n) {
  std::vector<std::uint8_t> pair(n);
  for (int i = 0; i < n; ++i) pair[i] = static_cast<std::uint8_t>(model.pair_symbol(x[i], y[i]));
  const double d = conditional_info_density(model, pair.data(), y, n);
  return prefix_length_from_density(d);
}

}  // namespace csi
