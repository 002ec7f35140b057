#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sep {

// 64-bit finalizer (murmur3); full avalanche, bijective.
inline uint64_t mix64(uint64_t z) {
  z ^= z >> 33;
  z *= 0xFF51AFD7ED558CCDULL;
  z ^= z >> 33;
  z *= 0xC4CEB9FE1A85EC53ULL;
  z ^= z >> 33;
  return z;
}

inline uint64_t hash_combine(uint64_t h, uint64_t v) {
  return mix64(h ^ (v + 0x9E3779B97F4A7C15ULL + (h << 12) + (h >> 4)));
}

// Derives an independent stream seed from (master, index); replica index,
// not scheduling order, determines the stream.
inline uint64_t derive_seed(uint64_t master, uint64_t index) {
  return mix64(hash_combine(master, index));
}

inline double u64_to_unit(uint64_t x) {  // [0,1)
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// mt19937_64 core with our own variate transforms so that streams are
// bit-reproducible across platforms (std:: distributions are not).
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  double uniform01() { return u64_to_unit(eng_()); }  // [0,1)

  // uniform integer in [0, n), n >= 1; rejection keeps it exact
  uint64_t below(uint64_t n) {
    uint64_t threshold = (0 - n) % n;
    for (;;) {
      uint64_t r = eng_();
      if (r >= threshold) return r % n;
    }
  }

  double exponential() {  // rate 1
    return -std::log1p(-uniform01());
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace sep
