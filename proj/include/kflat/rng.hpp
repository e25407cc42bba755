#pragma once

#include <cstdint>
#include <random>

namespace kflat {

/// Counter-based splittable PRNG (SplitMix64 output function over a keyed
/// counter). Distinct stream_ids from one seed give statistically independent
/// streams; identical (seed, stream_id, call sequence) reproduces bit-exactly
/// within one build.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_(stream_id), key_(derive_key(seed, stream_id)), counter_(0) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~static_cast<result_type>(0); }

  result_type operator()() {
    counter_ += 0x9E3779B97F4A7C15ull;
    return mix(key_ + counter_);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1).
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  double normal() { return normal_(*this); }

  std::int64_t poisson(double mean) {
    std::poisson_distribution<std::int64_t> dist(mean);
    return dist(*this);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
    return mix(mix(seed + 0x9E3779B97F4A7C15ull) ^
               mix(stream * 0xD1B54A32D192ED03ull + 0x8BB84B93962EACC9ull));
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_;
  std::normal_distribution<double> normal_;
};

}  // namespace kflat
