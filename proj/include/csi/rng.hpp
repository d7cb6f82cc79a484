#pragma once

#include <cstdint>

namespace csi {

// Counter-based generator: SplitMix64 finalizer applied to a per-stream key
// plus a Weyl-incremented counter. Any (seed, stream) pair addresses an
// independent stream, so Monte Carlo replicas can be generated in parallel
// and still reduce in a fixed order. Output is identical on every platform.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}

  std::uint64_t next_u64() {
    ctr_ += 0x9e3779b97f4a7c15ULL;
    return mix(key_ + ctr_);
  }

  // uniform in [0, 1), 53 random bits
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in (0, 1], safe as argument to log()
  double next_double_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  // uniform integer in [0, bound)
  std::uint64_t next_below(std::uint64_t bound) {
    // 64x64->128 multiply trick; bias is < 2^-64, irrelevant at desk scale
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace csi
