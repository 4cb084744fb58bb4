#pragma once

// Counter-based 64-bit RNG (splitmix64 finalizer over key+counter).
// Every draw is a pure function of (key, counter), which makes streams
// reproducible across platforms and cheap to split: child streams derive
// their key from the parent key and a caller-chosen stream tag.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace evoforge {

class Rng {
 public:
  Rng() : key_(0), ctr_(0) {}
  explicit Rng(std::uint64_t seed) : key_(mix(seed ^ kKeyTweak)), ctr_(0) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() { return mix(key_ + kGamma * ++ctr_); }

  // Child stream: independent of this stream's position.
  Rng split(std::uint64_t stream_tag) const {
    Rng child;
    child.key_ = mix(key_ ^ mix(stream_tag + kSplitTweak));
    child.ctr_ = 0;
    return child;
  }

  // [0, 1)
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // (0, 1]
  double uniform_pos() { return 1.0 - uniform(); }

  // [0, n)
  std::uint64_t uniform_int(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

  // Box-Muller; one value per call keeps the stream layout simple.
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return ctr_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kKeyTweak = 0x5851F42D4C957F2DULL;
  static constexpr std::uint64_t kSplitTweak = 0xD1342543DE82EF95ULL;

  std::uint64_t key_;
  std::uint64_t ctr_;
};

}  // namespace evoforge
