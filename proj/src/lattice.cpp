#include "sep/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sep/util.hpp"

namespace sep {

ParticleConfiguration::ParticleConfiguration(int half_size,
                                             const std::vector<int>& spins) {
  if (half_size < 1) throw std::invalid_argument("half_size must be >= 1");
  if (spins.size() != static_cast<std::size_t>(2 * half_size))
    throw std::invalid_argument("config length must be 2N");
  n_half_ = half_size;
  bits_.assign((spins.size() + 63) / 64, 0);
  k_ = 0;
  for (std::size_t i = 0; i < spins.size(); ++i) {
    if (spins[i] == 1) {
      bits_[i >> 6] |= uint64_t{1} << (i & 63);
      ++k_;
    } else if (spins[i] != -1) {
      throw std::invalid_argument("entries must be -1 or +1");
    }
  }
}

ParticleConfiguration ParticleConfiguration::from_bits(
    int half_size, std::vector<uint64_t> bits) {
  ParticleConfiguration c;
  c.n_half_ = half_size;
  int sites = 2 * half_size;
  if (bits.size() != static_cast<std::size_t>((sites + 63) / 64))
    throw std::invalid_argument("bit vector has wrong length");
  if (sites & 63) bits.back() &= (uint64_t{1} << (sites & 63)) - 1;
  c.k_ = 0;
  for (uint64_t w : bits) c.k_ += __builtin_popcountll(w);
  c.bits_ = std::move(bits);
  return c;
}

std::vector<int> ParticleConfiguration::spins() const {
  std::vector<int> s(size());
  for (int x = 1; x <= size(); ++x) s[x - 1] = spin(x);
  return s;
}

HeightFunction::HeightFunction(int half_size, std::vector<int64_t> heights)
    : n_half_(half_size), h_(std::move(heights)) {
  if (half_size < 1) throw std::invalid_argument("half_size must be >= 1");
  if (h_.size() != static_cast<std::size_t>(2 * half_size))
    throw std::invalid_argument("height vector length must be 2N");
  if (h_.back() % 2 != 0)
    throw std::invalid_argument("xi(0) = xi(2N) must be even");
  int64_t prev = h_.back();
  for (int64_t v : h_) {
    int64_t d = v - prev;
    if (d != 1 && d != -1)
      throw std::invalid_argument("heights must have unit increments");
    prev = v;
  }
}

StateDistribution::StateDistribution(int half_size,
                                     std::vector<double> probabilities)
    : n_half_(half_size), p_(std::move(probabilities)) {
  if (p_.size() != binomial(2 * half_size, half_size))
    throw std::invalid_argument("probability vector length must be C(2N,N)");
  double s = 0.0;
  for (double v : p_) {
    if (v < -1e-12) throw std::invalid_argument("negative probability");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-12)
    throw std::invalid_argument("probabilities must sum to 1");
}

ParticleConfiguration gradient(const HeightFunction& xi) {
  std::vector<int> s(xi.size());
  for (int x = 1; x <= xi.size(); ++x)
    s[x - 1] = static_cast<int>(xi.height(x) - xi.height(x - 1));
  return ParticleConfiguration(xi.half_size(), s);
}

HeightFunction integrate(const ParticleConfiguration& chi, int64_t offset) {
  if (!chi.balanced())
    throw std::invalid_argument("integrate requires a balanced configuration");
  if (offset % 2 != 0)
    throw std::invalid_argument("offset must be even to keep xi(0) even");
  std::vector<int64_t> h(chi.size());
  int64_t acc = offset;
  for (int x = 1; x <= chi.size(); ++x) {
    acc += chi.spin(x);
    h[x - 1] = acc;
  }
  return HeightFunction(chi.half_size(), std::move(h));
}

ParticleConfiguration worst_case(int half_size) {
  if (half_size < 1) throw std::invalid_argument("half_size must be >= 1");
  std::vector<int> s(2 * half_size, -1);
  std::fill(s.begin(), s.begin() + half_size, +1);
  return ParticleConfiguration(half_size, s);
}

ParticleConfiguration uniform_sample(int half_size, int k, Rng& rng) {
  int sites = 2 * half_size;
  if (k < 0 || k > sites) throw std::invalid_argument("k out of range");
  std::vector<int> s(sites, -1);
  std::fill(s.begin(), s.begin() + k, +1);
  for (int i = sites - 1; i > 0; --i) {
    int j = static_cast<int>(rng.below(i + 1));
    std::swap(s[i], s[j]);
  }
  return ParticleConfiguration(half_size, s);
}

uint64_t rank(const ParticleConfiguration& chi) {
  if (!chi.balanced())
    throw std::invalid_argument("rank requires a balanced configuration");
  int n = chi.size(), k = chi.half_size();
  // Lexicographic rank of the sorted particle-position set: count the
  // k-subsets that precede it.
  uint64_t r = 0;
  int chosen = 0, prev = 0;
  for (int x = 1; x <= n && chosen < k; ++x) {
    if (chi.spin(x) == +1) {
      for (int j = prev + 1; j < x; ++j)
        r += binomial(n - j, k - chosen - 1);
      prev = x;
      ++chosen;
    }
  }
  return r;
}

ParticleConfiguration unrank(int half_size, uint64_t index) {
  int n = 2 * half_size, k = half_size;
  if (index >= binomial(n, k)) throw std::out_of_range("rank out of range");
  std::vector<int> s(n, -1);
  int x = 1;
  for (int chosen = 0; chosen < k; ++chosen) {
    for (;; ++x) {
      uint64_t block = binomial(n - x, k - chosen - 1);
      if (index < block) break;
      index -= block;
    }
    s[x - 1] = +1;
    ++x;
  }
  return ParticleConfiguration(half_size, s);
}

double tv_distance(const StateDistribution& p, const StateDistribution& q) {
  if (p.half_size() != q.half_size() || p.states() != q.states())
    throw std::invalid_argument("dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.states(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

namespace {

// Prefix sums S(0..2N) of eta(z) - c*sin(pi z/N + theta); S(2N) ~ 0, so the
// window max equals max S - min S over one period.
std::vector<double> deviation_prefix(const ParticleConfiguration& eta,
                                     double alpha, double theta, double t) {
  if (!eta.balanced())
    throw std::invalid_argument("window deviation requires a balanced state");
  int n2 = eta.size();
  double n = eta.half_size();
  double lambda = 2.0 * (1.0 - std::cos(M_PI / n));
  double c = alpha * std::exp(-lambda * t);
  std::vector<double> s(n2 + 1);
  s[0] = 0.0;
  for (int z = 1; z <= n2; ++z)
    s[z] = s[z - 1] + eta.spin(z) - c * std::sin(M_PI * z / n + theta);
  return s;
}

}  // namespace

double max_partial_sum_deviation(const ParticleConfiguration& eta,
                                 double alpha, double theta, double t) {
  auto s = deviation_prefix(eta, alpha, theta, t);
  double lo = s[0], hi = s[0];
  for (int z = 1; z < eta.size(); ++z) {  // index 2N duplicates index 0
    lo = std::min(lo, s[z]);
    hi = std::max(hi, s[z]);
  }
  return hi - lo;
}

double max_partial_sum_deviation_bruteforce(const ParticleConfiguration& eta,
                                            double alpha, double theta,
                                            double t) {
  auto s = deviation_prefix(eta, alpha, theta, t);
  int n2 = eta.size();
  double best = 0.0;
  // windows (x,y] via lifted representatives x0 < y0 <= x0 + 2N
  for (int x0 = 0; x0 < n2; ++x0)
    for (int y0 = x0; y0 <= x0 + n2; ++y0) {
      double w = (y0 >= n2 ? s[y0 - n2] + s[n2] : s[y0]) - s[x0];
      best = std::max(best, std::abs(w));
    }
  return best;
}

bool in_fluctuation_set(const ParticleConfiguration& eta, double alpha,
                        double theta) {
  double bound =
      std::sqrt(static_cast<double>(eta.half_size())) * loglog_floor(eta.half_size());
  return max_partial_sum_deviation(eta, alpha, theta, 0.0) <= bound;
}

}  // namespace sep
