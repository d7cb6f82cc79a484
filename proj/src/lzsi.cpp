#include "csi/lzsi.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "csi/kernels.hpp"
#include "csi/recurrence.hpp"

namespace csi {

void gamma_encode(BitWriter& bw, std::uint64_t r) {
  if (r < 1 || r > (1ull << 62)) throw Error(Errc::BadSpec, "gamma code requires r in [1, 2^62]");
  const int l = std::bit_width(r) - 1;
  for (int i = 0; i < l; ++i) bw.put_bit(0);
  bw.put_bits(r, l + 1);
}

std::uint64_t gamma_decode(BitReader& br) {
  int l = 0;
  while (br.get_bit() == 0) {
    if (++l > 62) throw Error(Errc::BadSpec, "gamma code run too long");
  }
  std::uint64_t r = 1;
  for (int i = 0; i < l; ++i) r = (r << 1) | static_cast<std::uint64_t>(br.get_bit());
  return r;
}

int gamma_length_bits(std::uint64_t r) { return 2 * (std::bit_width(r) - 1) + 1; }

std::int64_t gamma_length_bits_from_log2(double log2_r) {
  return 2 * static_cast<std::int64_t>(std::floor(log2_r)) + 1;
}

int raw_bits_per_symbol(const PairModel& model) {
  const int X = model.x_alphabet().size;
  return X <= 1 ? 0 : std::bit_width(static_cast<unsigned>(X - 1));
}

LzsiToken lzsi_encode(const PairModel& model, const TwoSidedSample& s) {
  LzsiToken t;
  t.n = s.n;
  const auto obs = conditional_recurrence(s);
  if (obs.truncated) {
    t.escape = true;
    t.raw_x.assign(s.present_x(), s.present_x() + s.n);
    t.total_bits = 1 + s.n * raw_bits_per_symbol(model);
    return t;
  }
  t.r = static_cast<std::uint64_t>(obs.r_conditional);
  t.gamma_bits = gamma_length_bits(t.r);
  t.total_bits = 1 + t.gamma_bits;
  return t;
}

std::vector<std::uint8_t> lzsi_decode(const PairModel& model, const std::uint8_t* past_x,
                                      const std::uint8_t* past_y, std::int64_t m,
                                      const std::uint8_t* present_y, int n,
                                      const LzsiToken& token) {
  if (token.escape) return token.raw_x;
  std::vector<std::uint8_t> x(n);
  // scan y-occurrences in increasing shift order; windows may straddle into
  // the present block
  auto y_at = [&](std::int64_t pos) -> std::uint8_t {
    return pos >= 1 ? present_y[pos - 1] : past_y[m - 1 + pos];
  };
  std::uint64_t seen = 0;
  for (std::int64_t i = 1; i <= m; ++i) {
    bool match = true;
    for (int j = 1; j <= n && match; ++j) match = y_at(-i + j) == present_y[j - 1];
    if (!match) continue;
    if (++seen < token.r) continue;
    // copy the aligned x-window; positions >= 1 refer to already-decoded
    // symbols (standard overlapped copy)
    for (int j = 1; j <= n; ++j) {
      const std::int64_t pos = -i + j;
      x[j - 1] = pos >= 1 ? x[pos - 1] : past_x[m - 1 + pos];
    }
    return x;
  }
  throw Error(Errc::InvalidCodeword, "token recurrence index exceeds the shared past");
}

void write_token(BitWriter& bw, const PairModel& model, const LzsiToken& token) {
  bw.put_bit(token.escape ? 1 : 0);
  if (token.escape) {
    const int bps = raw_bits_per_symbol(model);
    for (std::uint8_t v : token.raw_x) bw.put_bits(v, bps);
  } else {
    gamma_encode(bw, token.r);
  }
  bw.pad_to_byte();
}

LzsiToken read_token(BitReader& br, const PairModel& model, int n) {
  LzsiToken t;
  t.n = n;
  t.escape = br.get_bit() == 1;
  if (t.escape) {
    const int bps = raw_bits_per_symbol(model);
    t.raw_x.resize(n);
    for (int i = 0; i < n; ++i) t.raw_x[i] = static_cast<std::uint8_t>(br.get_bits(bps));
    t.total_bits = 1 + n * bps;
  } else {
    t.r = gamma_decode(br);
    t.gamma_bits = gamma_length_bits(t.r);
    t.total_bits = 1 + t.gamma_bits;
  }
  br.align_byte();
  return t;
}

namespace {

void put_u16(std::vector<std::uint8_t>& v, std::uint16_t x) {
  for (int i = 0; i < 2; ++i) v.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
}
void put_u32(std::vector<std::uint8_t>& v, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) v.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
}
void put_u64(std::vector<std::uint8_t>& v, std::uint64_t x) {
  for (int i = 0; i < 8; ++i) v.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
}
std::uint64_t get_le(const std::vector<std::uint8_t>& v, std::size_t& off, int bytes) {
  if (off + bytes > v.size()) throw Error(Errc::BadSpec, "token stream header truncated");
  std::uint64_t x = 0;
  for (int i = 0; i < bytes; ++i) x |= static_cast<std::uint64_t>(v[off + i]) << (8 * i);
  off += static_cast<std::size_t>(bytes);
  return x;
}

}  // namespace

std::vector<std::uint8_t> serialize_stream(const PairModel& model, const LzsiStreamHeader& h,
                                           const std::vector<LzsiToken>& tokens) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), {'C', 'S', 'I', '1'});
  put_u16(out, 1);
  put_u32(out, h.n);
  put_u64(out, static_cast<std::uint64_t>(h.m));
  put_u64(out, h.model_hash);
  put_u64(out, h.seed);
  put_u32(out, static_cast<std::uint32_t>(tokens.size()));
  BitWriter bw;
  for (const auto& t : tokens) write_token(bw, model, t);
  out.insert(out.end(), bw.bytes().begin(), bw.bytes().end());
  return out;
}

std::pair<LzsiStreamHeader, std::vector<LzsiToken>> parse_stream(
    const PairModel& model, const std::vector<std::uint8_t>& bytes) {
  std::size_t off = 0;
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "CSI1", 4) != 0)
    throw Error(Errc::BadSpec, "bad token stream magic");
  off = 4;
  const auto version = get_le(bytes, off, 2);
  if (version != 1) throw Error(Errc::BadSpec, "unsupported token stream version");
  LzsiStreamHeader h;
  h.n = static_cast<std::uint32_t>(get_le(bytes, off, 4));
  h.m = static_cast<std::int64_t>(get_le(bytes, off, 8));
  h.model_hash = get_le(bytes, off, 8);
  h.seed = get_le(bytes, off, 8);
  h.block_count = static_cast<std::uint32_t>(get_le(bytes, off, 4));
  if (h.model_hash != model.hash())
    throw Error(Errc::BadSpec, "token stream was produced with a different model");
  BitReader br(bytes.data() + off, bytes.size() - off);
  std::vector<LzsiToken> tokens;
  tokens.reserve(h.block_count);
  for (std::uint32_t b = 0; b < h.block_count; ++b)
    tokens.push_back(read_token(br, model, static_cast<int>(h.n)));
  return {h, std::move(tokens)};
}

}  // namespace csi
