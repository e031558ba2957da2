#pragma once

// Seed derivation and the stream generator used by every sampler.
//
//   mix(seed, k)  = splitmix64_finalize(seed + (k + 1) * 0x9E3779B97F4A7C15)
//   Stream(seed)  = xoshiro256** with state filled by four SplitMix64 steps
//                   from `seed`
//   uniform()     = (next() >> 11) * 2^-53, in [0, 1)
//
// Both algorithms are short, public-domain and easy to reimplement.

#include <array>
#include <bit>
#include <cstdint>

namespace pmscale {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t splitmix64_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Child seed number `k` of `seed`.
constexpr std::uint64_t mix(std::uint64_t seed, std::uint64_t k) {
  return splitmix64_finalize(seed + (k + 1) * kGoldenGamma);
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t state) : state_(state) {}
  constexpr std::uint64_t next() {
    state_ += kGoldenGamma;
    return splitmix64_finalize(state_);
  }

 private:
  std::uint64_t state_;
};

/// xoshiro256** seeded from SplitMix64.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Stream(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  constexpr result_type operator()() { return next(); }

  constexpr std::uint64_t next() {
    const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
  }

  constexpr double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace pmscale
