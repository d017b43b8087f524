#pragma once

#include <cstdint>
#include <random>

namespace cvqd {

// Deterministic RNG with fixed bit-to-double mapping, so seeded runs
// reproduce bitwise across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // [0, 1), 53-bit resolution
  double uniform01() { return double(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // inclusive bounds, rejection-free modulo with negligible bias for small ranges
  int uniform_int(int lo, int hi) {
    std::uint64_t span = std::uint64_t(hi - lo) + 1;
    return lo + int(gen_() % span);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace cvqd
