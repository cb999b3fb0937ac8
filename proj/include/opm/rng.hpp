#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace opm {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so paths can be generated out of order, in
// parallel, or extended backward in time without consuming shared state.
// The mixing function is the SplitMix64 finalizer applied in two rounds.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t bits(std::uint64_t stream, std::int64_t counter) const {
    std::uint64_t h = mix(seed_ ^ mix(stream * 0xD1B54A32D192ED03ULL + 0x632BE59BD9B4E019ULL));
    return mix(h ^ static_cast<std::uint64_t>(counter) * 0x9E6C63D0676A9A99ULL);
  }

  // Uniform on the open interval (0, 1).
  double uniform(std::uint64_t stream, std::int64_t counter) const {
    return (static_cast<double>(bits(stream, counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller on the counter pair (2c, 2c+1).
  double normal(std::uint64_t stream, std::int64_t counter) const {
    const double u1 = uniform(stream, 2 * counter);
    const double u2 = uniform(stream, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Derive an independent seed, e.g. per ensemble member.
  static std::uint64_t derive(std::uint64_t base, std::uint64_t index) {
    return mix(mix(base) ^ mix(index + 0x5851F42D4C957F2DULL));
  }

 private:
  std::uint64_t seed_;
};

}  // namespace opm
