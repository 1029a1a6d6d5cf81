#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace alemo {

/// Seeded random stream with derivable child streams.
///
/// Child streams are derived from the parent's seed and a child index, so a
/// batch of trials can each own an independent stream while the whole batch
/// stays reproducible from one base seed. All floating-point draws go through
/// explicit bit manipulation of the raw engine output, so a given seed yields
/// the same sequence on any platform with IEEE doubles.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(mix(seed, 0x243f6a8885a308d3ull)) {}

  [[nodiscard]] RandomStream child(std::uint64_t index) const { return RandomStream(mix(seed_, index)); }

  [[nodiscard]] std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform draw in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform index in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

  /// Standard normal via Box-Muller; two uniform draws per call.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finalizer over seed advanced by the child index
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace alemo
