#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace sep {

// Runs fn(i) for i in [0, n) on up to n_threads workers. Work items must be
// independent; callers get determinism by keying everything on i and merging
// results in index order afterwards.
inline void parallel_for(std::size_t n, unsigned n_threads,
                         const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  if (n_threads <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  unsigned workers = static_cast<unsigned>(std::min<std::size_t>(n_threads, n));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

// Exact binomial coefficients; n <= 62 keeps everything in uint64.
inline uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (n > 62) throw std::overflow_error("binomial: n too large for uint64");
  unsigned __int128 c = 1;
  if (k > n - k) k = n - k;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return static_cast<uint64_t>(c);
}

// max(log log N, 1): the asymptotic formulas need a floor at desk scale.
inline double loglog_floor(int n_half) {
  if (n_half < 3) return 1.0;
  double ll = std::log(std::log(static_cast<double>(n_half)));
  return ll > 1.0 ? ll : 1.0;
}

}  // namespace sep
