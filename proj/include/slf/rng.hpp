#pragma once

#include <cmath>
#include <cstdint>

namespace slf {

// PCG32 (O'Neill). All randomness in the project flows through this
// generator so that runs are reproducible independent of the standard
// library's distribution implementations.
class Pcg32 {
 public:
  explicit Pcg32(std::uint64_t seed, std::uint64_t stream = 0x14057b7ef767814fULL) {
    state_ = 0u;
    inc_ = (stream << 1u) | 1u;
    next_u32();
    state_ += seed;
    next_u32();
  }

  std::uint32_t next_u32() {
    std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  std::uint64_t next_u64() {
    std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform integer in [lo, hi] inclusive, rejection-sampled to avoid bias.
  int uniform_int(int lo, int hi) {
    if (hi <= lo) return lo;
    std::uint32_t range = static_cast<std::uint32_t>(hi - lo) + 1u;
    std::uint32_t limit = 0xffffffffu - (0xffffffffu % range);
    std::uint32_t v;
    do {
      v = next_u32();
    } while (v > limit);
    return lo + static_cast<int>(v % range);
  }

  bool coin() { return (next_u32() >> 31) != 0u; }

  // Standard normal via Box-Muller; the spare value is cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = next_double();
    } while (u1 <= 0.0);
    u2 = next_double();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  // Derive an independent generator for a named substream.
  Pcg32 fork(std::uint64_t substream) const {
    return Pcg32(state_ ^ (substream * 0x9e3779b97f4a7c15ULL), inc_ ^ substream);
  }

 private:
  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace slf
