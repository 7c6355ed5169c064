#pragma once

#include <cstdint>

namespace noteg {

/// SplitMix64 (Steele, Lea & Flood 2014). One 64-bit word of state, so the
/// whole generator can be folded into the scene hash. The algorithm is fixed:
/// changing it invalidates every recorded replay hash.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  std::uint64_t state() const { return state_; }

  bool operator==(const SplitMix64&) const = default;

 private:
  std::uint64_t state_;
};

}  // namespace noteg
