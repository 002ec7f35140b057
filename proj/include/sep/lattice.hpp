#pragma once

#include <cstdint>
#include <vector>

#include "sep/rng.hpp"

namespace sep {

// Occupancy configuration on the ring Z_{2N}, entries in {-1,+1}.
// Sites are addressed 1..2N at the interface (cyclic); storage is 0-based
// packed bits (+1 -> 1, -1 -> 0) with the particle count cached.
// Immutable after construction.
class ParticleConfiguration {
 public:
  ParticleConfiguration(int half_size, const std::vector<int>& spins);

  static ParticleConfiguration from_bits(int half_size,
                                         std::vector<uint64_t> bits);

  int half_size() const { return n_half_; }
  int size() const { return 2 * n_half_; }
  int particles() const { return k_; }
  bool balanced() const { return k_ == n_half_; }

  // x is interpreted cyclically; any integer accepted.
  int spin(int x) const {
    int i = mod_site(x);
    return (bits_[i >> 6] >> (i & 63)) & 1 ? +1 : -1;
  }

  std::vector<int> spins() const;

  bool operator==(const ParticleConfiguration& o) const {
    return n_half_ == o.n_half_ && bits_ == o.bits_;
  }

 private:
  ParticleConfiguration() = default;
  int mod_site(int x) const {
    int m = (x - 1) % (2 * n_half_);
    return m < 0 ? m + 2 * n_half_ : m;
  }
  int n_half_ = 0;
  int k_ = 0;
  std::vector<uint64_t> bits_;
};

// Discrete height function on the ring: |xi(x+1)-xi(x)| = 1 cyclically and
// xi(0) := xi(2N) is even. The cyclic closure forces a balanced gradient.
class HeightFunction {
 public:
  HeightFunction(int half_size, std::vector<int64_t> heights);

  int half_size() const { return n_half_; }
  int size() const { return 2 * n_half_; }

  int64_t height(int x) const {  // cyclic, x any integer
    int m = x % (2 * n_half_);
    if (m <= 0) m += 2 * n_half_;
    return h_[m - 1];
  }

  const std::vector<int64_t>& data() const { return h_; }

  bool operator==(const HeightFunction& o) const {
    return n_half_ == o.n_half_ && h_ == o.h_;
  }

 private:
  int n_half_;
  std::vector<int64_t> h_;  // xi(1..2N)
};

// Explicit probability vector over the balanced states of Omega_N, indexed
// by the canonical rank (combinatorial number system of the particle set).
class StateDistribution {
 public:
  StateDistribution(int half_size, std::vector<double> probabilities);

  int half_size() const { return n_half_; }
  std::size_t states() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& data() const { return p_; }

 private:
  int n_half_;
  std::vector<double> p_;
};

// eta(x) = xi(x) - xi(x-1); the result is balanced by cyclic closure.
ParticleConfiguration gradient(const HeightFunction& xi);

// xi(x) = offset + sum_{z<=x} chi(z); offset must be even, chi balanced.
HeightFunction integrate(const ParticleConfiguration& chi, int64_t offset);

// chi_max: +1 on 1..N, -1 on N+1..2N (the b-maximizer up to translation).
ParticleConfiguration worst_case(int half_size);

// Uniform over configurations with exactly k particles (Fisher-Yates).
ParticleConfiguration uniform_sample(int half_size, int k, Rng& rng);

// Canonical rank of a balanced configuration: lexicographic rank of its
// particle-position set under the combinatorial number system. O(N).
uint64_t rank(const ParticleConfiguration& chi);
ParticleConfiguration unrank(int half_size, uint64_t index);

// (1/2) sum |p - q|; equal positive-part form is exercised in tests.
double tv_distance(const StateDistribution& p, const StateDistribution& q);

// H_{t,alpha}: max over cyclic windows (x,y] of
// |sum_{z=x+1}^{y} (eta(z) - alpha e^{-lambda_N t} sin(pi z/N + theta))|.
// The summand has zero total sum, so window sums are lift-independent.
double max_partial_sum_deviation(const ParticleConfiguration& eta,
                                 double alpha, double theta, double t);

// Quadratic all-windows oracle for the functional above (tests).
double max_partial_sum_deviation_bruteforce(const ParticleConfiguration& eta,
                                            double alpha, double theta,
                                            double t);

// Membership in G^N_{alpha,theta}: deviation at t=0 within
// sqrt(N) * max(log log N, 1).
bool in_fluctuation_set(const ParticleConfiguration& eta, double alpha,
                        double theta);

}  // namespace sep
