#pragma once

#include <cmath>
#include <cstdint>

namespace spotquart {

// SplitMix64 step (Steele/Lea/Vigna). Advances the state and returns one output.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Seed of the RNG stream for one replication. A pure function of
// (master, index), so results never depend on which worker ran which
// replication or in what order.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master ^ (0xD1B54A32D192ED03ull * (index + 1));
  return splitmix64(s);
}

// xoshiro256++ 1.0 (Blackman/Vigna), seeded through SplitMix64.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ull; }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

// Standard normal deviates via the Marsaglia polar method. Self-contained so
// that streams are bit-reproducible regardless of the C++ runtime in use.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * rng_.uniform01() - 1.0;
      v = 2.0 * rng_.uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  Xoshiro256pp& engine() { return rng_; }

 private:
  Xoshiro256pp rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace spotquart
