#pragma once

#include <cstdint>
#include <vector>

#include "csi/model.hpp"
#include "csi/sample.hpp"

namespace csi {

// MSB-first bit stream.
class BitWriter {
 public:
  void put_bit(int b) {
    if (fill_ == 0) bytes_.push_back(0);
    bytes_.back() |= static_cast<std::uint8_t>((b & 1) << (7 - fill_));
    fill_ = (fill_ + 1) & 7;
  }
  void put_bits(std::uint64_t v, int nbits) {
    for (int i = nbits - 1; i >= 0; --i) put_bit(static_cast<int>((v >> i) & 1));
  }
  void pad_to_byte() { fill_ = 0; }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  std::size_t bit_count() const { return bytes_.empty() ? 0 : (bytes_.size() - 1) * 8 + (fill_ == 0 ? 8 : fill_); }

 private:
  std::vector<std::uint8_t> bytes_;
  int fill_ = 0;  // bits used in the last byte (0 = byte boundary)
};

class BitReader {
 public:
  BitReader(const std::uint8_t* data, std::size_t len) : data_(data), len_(len) {}
  int get_bit() {
    if (pos_ >= len_ * 8) throw Error(Errc::BadSpec, "bit stream exhausted");
    const int b = (data_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1;
    ++pos_;
    return b;
  }
  std::uint64_t get_bits(int nbits) {
    std::uint64_t v = 0;
    for (int i = 0; i < nbits; ++i) v = (v << 1) | static_cast<std::uint64_t>(get_bit());
    return v;
  }
  void align_byte() { pos_ = (pos_ + 7) & ~static_cast<std::size_t>(7); }
  std::size_t bit_pos() const { return pos_; }

 private:
  const std::uint8_t* data_;
  std::size_t len_;
  std::size_t pos_ = 0;
};

// Elias gamma: floor(log2 r) zeros followed by the binary expansion of r;
// 2*floor(log2 r) + 1 bits, r in [1, 2^62].
void gamma_encode(BitWriter& bw, std::uint64_t r);
std::uint64_t gamma_decode(BitReader& br);
int gamma_length_bits(std::uint64_t r);
// token length from log2 R alone (used when R exceeds integer range)
std::int64_t gamma_length_bits_from_log2(double log2_r);

struct LzsiToken {
  int n = 0;
  bool escape = false;
  std::uint64_t r = 0;               // conditional recurrence (valid unless escape)
  std::vector<std::uint8_t> raw_x;   // escape payload
  int gamma_bits = 0;                // 2 floor(log2 R) + 1, 0 for escape
  int total_bits = 0;                // flag + payload
};

// Escape tokens carry the present x verbatim in n * ceil(log2 |X|) bits.
int raw_bits_per_symbol(const PairModel& model);

// Encode the present window of a two-sided sample: the conditional
// recurrence index when it is observable within the sample's past, the
// escape path otherwise.
LzsiToken lzsi_encode(const PairModel& model, const TwoSidedSample& s);

// Reconstruct the present x from the shared past, the present side
// information and one token. past_* hold m symbols, oldest first.
std::vector<std::uint8_t> lzsi_decode(const PairModel& model, const std::uint8_t* past_x,
                                      const std::uint8_t* past_y, std::int64_t m,
                                      const std::uint8_t* present_y, int n,
                                      const LzsiToken& token);

void write_token(BitWriter& bw, const PairModel& model, const LzsiToken& token);
LzsiToken read_token(BitReader& br, const PairModel& model, int n);

// Token stream file layout (all little-endian):
//   magic "CSI1" | u16 version=1 | u32 n | i64 m | u64 model_hash |
//   u64 seed | u32 block_count | blocks (each byte-padded)
struct LzsiStreamHeader {
  std::uint32_t n = 0;
  std::int64_t m = 0;
  std::uint64_t model_hash = 0;
  std::uint64_t seed = 0;
  std::uint32_t block_count = 0;
};
std::vector<std::uint8_t> serialize_stream(const PairModel& model, const LzsiStreamHeader& h,
                                           const std::vector<LzsiToken>& tokens);
std::pair<LzsiStreamHeader, std::vector<LzsiToken>> parse_stream(
    const PairModel& model, const std::vector<std::uint8_t>& bytes);

}  // namespace csi
