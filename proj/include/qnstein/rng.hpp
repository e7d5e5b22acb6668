#pragma once

#include <cstdint>
#include <random>

namespace qnstein {

/// Seed-derived, splittable random stream.
///
/// A stream is identified by a 64-bit key. `split(i)` derives an independent
/// child deterministically from (key, i), so sample i of a batch can be drawn
/// from `parent.split(i)` regardless of evaluation order.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key = 0) : key_(key), engine_(mix(key)) {}

  std::uint64_t key() const { return key_; }

  RandomStream split(std::uint64_t index) const {
    return RandomStream(mix(key_ ^ mix(index + 0x9e3779b97f4a7c15ULL)));
  }

  double normal() { return normal_(engine_); }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  /// +1 or -1 with equal probability.
  double rademacher() { return (engine_() >> 63) ? 1.0 : -1.0; }

  std::uint64_t binomial(std::uint64_t trials, double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    return std::binomial_distribution<std::uint64_t>(trials, p)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  // SplitMix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace qnstein
