#pragma once
#include <cstdint>

namespace esflow {

// splitmix64; fixed stream so seeded sweeps are reproducible across platforms
struct SplitMix64 {
  std::uint64_t x;
  explicit SplitMix64(std::uint64_t seed) : x(seed) {}
  std::uint64_t next() {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform(double lo = 0.0, double hi = 1.0) {
    const std::uint64_t u = next() >> 11;  // 53-bit mantissa double in [0,1)
    return lo + (hi - lo) * (static_cast<double>(u) * (1.0 / 9007199254740992.0));
  }
};

}  // namespace esflow
