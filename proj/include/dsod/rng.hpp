// Deterministic random streams. std::normal_distribution and friends are
// implementation-defined, which would break byte-identical reruns, so the
// generators are pinned here: SplitMix64 for seeding, xoshiro256++ for the
// stream, Box-Muller for gaussians. Trial k of a run always draws from
// trial_stream(seed, k), independent of worker count.
#pragma once

#include <cmath>
#include <cstdint>

namespace dsod {

struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

struct Xoshiro256pp {
  std::uint64_t s[4];

  explicit Xoshiro256pp(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s) w = sm.next();
  }

  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  }

  // Uniform on [0,1), 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1]; safe as a log() argument.
  double uniform01_open_zero() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }
};

// Box-Muller pairs, consumed one value at a time.
class GaussianSource {
 public:
  explicit GaussianSource(Xoshiro256pp rng) : rng_(rng) {}
  explicit GaussianSource(std::uint64_t seed) : rng_(Xoshiro256pp(seed)) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = rng_.uniform01_open_zero();
    const double u2 = rng_.uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  Xoshiro256pp& engine() { return rng_; }

 private:
  Xoshiro256pp rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Decorrelated stream for one Monte Carlo trial; depends only on (seed, trial).
inline Xoshiro256pp trial_stream(std::uint64_t seed, std::uint64_t trial) {
  SplitMix64 sm(seed ^ (0x6a09e667f3bcc909ULL + trial * 0x9e3779b97f4a7c15ULL));
  return Xoshiro256pp(sm.next());
}

}  // namespace dsod
