#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csi/model.hpp"

namespace csi {

// One-to-one codewords: the r-th string of {0,1}* in length-then-lex order
// (empty, 0, 1, 00, 01, 10, 11, 000, ...) is the binary expansion of r with
// the leading 1 removed, so its length is floor(log2 r).
struct Codeword {
  std::uint64_t rank = 1;  // 1-based
  std::string bits;        // '0'/'1' characters, possibly empty
  int length = 0;
};

Codeword codeword_for_rank(std::uint64_t rank);

// Probability ranking of all x-strings for a fixed side-information string.
// Ties break lexicographically in x.
struct CodeAssignment {
  int n = 0;
  std::vector<std::uint8_t> y;
  double y_log2 = 0;                 // log2 P(y_1^n)
  std::vector<std::uint32_t> ranking;  // ranking[r] = lex index of the rank-(r+1) string
  std::vector<std::uint32_t> rank_of;  // rank_of[lex index] = 0-based rank
  std::vector<double> cond_log2;       // log2 P(x|y) by lex index (-inf allowed)
};

// Enumerates |X|^n strings (guard 1e7); throws ConditioningOnNull if P(y)=0.
CodeAssignment build_assignment(const PairModel& model, const std::uint8_t* y, int n);

std::uint32_t lex_index(const PairModel& model, const std::uint8_t* x, int n);
std::vector<std::uint8_t> lex_string(const PairModel& model, std::uint32_t index, int n);

Codeword encode_opt(const CodeAssignment& a, const PairModel& model, const std::uint8_t* x);
std::vector<std::uint8_t> decode_opt(const CodeAssignment& a, const PairModel& model,
                                     const std::string& bits);

Codeword encode_opt(const PairModel& model, const std::uint8_t* x, const std::uint8_t* y, int n);
std::vector<std::uint8_t> decode_opt(const PairModel& model, const std::string& bits,
                                     const std::uint8_t* y, int n);

// floor(log2 rank(x|y)) by enumeration (reference implementation, guarded).
int optimal_codelength(const PairModel& model, const std::uint8_t* x, const std::uint8_t* y,
                       int n);

// ceil(-log2 P(x|y)); ZeroProbability if P(x|y) = 0.
std::int64_t prefix_codelength(const PairModel& model, const std::uint8_t* x,
                               const std::uint8_t* y, int n);
std::int64_t prefix_length_from_density(double density_bits);

}  // namespace csi
