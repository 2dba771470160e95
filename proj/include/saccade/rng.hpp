#pragma once

#include <cmath>
#include <cstdint>

namespace saccade {

// Deterministic generator used everywhere randomness is needed. std::mt19937
// plus the standard distributions would tie results to the C++ runtime, so
// uniform/normal draws are implemented here on top of splitmix64 and are
// identical for a given seed on every build.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  uint64_t below(uint64_t n) {
    // Modulo bias is negligible for n << 2^64 and keeps the draw count fixed.
    return next_u64() % n;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // Box-Muller; u1 is kept away from 0 so log() stays finite.
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double std) { return mean + std * normal(); }

 private:
  uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Mixes a parent seed with stream identifiers so derived generators are
// decorrelated and order-independent.
inline uint64_t derive_seed(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
  auto mix = [](uint64_t h, uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    uint64_t z = h;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  uint64_t h = mix(seed, 0x5ac1d5eedull);
  h = mix(h, a);
  h = mix(h, b);
  h = mix(h, c);
  return h;
}

}  // namespace saccade
