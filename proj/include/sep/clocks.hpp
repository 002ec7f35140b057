#pragma once

#include <cassert>
#include <cstdint>
#include <unordered_map>

#include "sep/rng.hpp"

namespace sep {

// Index of one Poisson clock stream: (direction, site, level). Reachable
// corner levels satisfy z = x (mod 2) because xi(0) is even and steps are
// unit; valid_parity() checks exactly that.
struct ClockKey {
  uint8_t direction = 0;  // 0 = down, 1 = up
  int32_t site = 1;       // 1..2N
  int64_t level = 0;

  bool operator==(const ClockKey& o) const {
    return direction == o.direction && site == o.site && level == o.level;
  }
  bool valid_parity() const {
    return ((level % 2 + 2) % 2) == ((site % 2 + 2) % 2);
  }
};

struct ClockKeyHash {
  std::size_t operator()(const ClockKey& k) const {
    uint64_t h = hash_combine(0x5ec5u, k.direction);
    h = hash_combine(h, static_cast<uint64_t>(static_cast<int64_t>(k.site)));
    h = hash_combine(h, static_cast<uint64_t>(k.level));
    return static_cast<std::size_t>(h);
  }
};

// A full realization of the independent rate-one clock processes indexed by
// (direction, site, level), reproducible from one 64-bit seed. Ring times of
// a key are cumulative iid Exp(1) inter-arrivals generated by a keyed
// counter-based hash, so every consumer sees the same realization.
//
// Queries must arrive at nondecreasing times (the event loop's clock); one
// realization therefore serves one coupled run.
class ClockRealization {
 public:
  explicit ClockRealization(uint64_t seed) : seed_(seed) {}

  uint64_t seed() const { return seed_; }

  // i-th inter-arrival (i >= 1) of the stream; pure function of (seed,key,i).
  double interarrival(const ClockKey& key, uint64_t i) const {
    uint64_t h = hash_combine(seed_, key.direction);
    h = hash_combine(h, static_cast<uint64_t>(static_cast<int64_t>(key.site)));
    h = hash_combine(h, static_cast<uint64_t>(key.level));
    h = hash_combine(h, i);
    // strictly inside (0,1): keeps ring times strictly increasing
    double u = (static_cast<double>(h >> 12) + 0.5) * 0x1.0p-52;
    return -std::log(u);
  }

  // i-th ring time, recomputed from scratch (test/audit accessor).
  double ring_time(const ClockKey& key, uint64_t i) const {
    double t = 0.0;
    for (uint64_t j = 1; j <= i; ++j) t += interarrival(key, j);
    return t;
  }

  // First ring strictly after t. Amortized O(#rings consumed).
  double first_ring_after(const ClockKey& key, double t) {
    assert(t >= watermark_ - 1e-9);
    if (t > watermark_) watermark_ = t;
    Cursor& c = cursors_[key];
    if (c.count == 0) {
      c.time = interarrival(key, ++c.count);
    }
    while (c.time <= t) c.time += interarrival(key, ++c.count);
    return c.time;
  }

  std::size_t keys_touched() const { return cursors_.size(); }

 private:
  struct Cursor {
    uint64_t count = 0;  // index of the ring stored in `time`
    double time = 0.0;
  };
  uint64_t seed_;
  double watermark_ = 0.0;
  std::unordered_map<ClockKey, Cursor, ClockKeyHash> cursors_;
};

}  // namespace sep
