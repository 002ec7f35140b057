#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "sep/lattice.hpp"
#include "sep/rng.hpp"

namespace sep {

// Parameters of the exponentially tilted measure nu^{N,alpha,theta}:
// d nu / d mu = exp(alpha a_theta(eta)) / mu(exp(alpha a_theta)).
struct TiltedMeasureSpec {
  int half_size = 1;
  double alpha = 0.0;
  double theta = 0.0;

  void validate() const;
};

// a_theta(eta) = sum_x eta(x) sin(pi x/N + theta).
double a_statistic(const ParticleConfiguration& eta, double theta);

// Constrained partition DP over (site, remaining particles), all in log
// domain. suffix[x][m] = log sum over assignments of sites x..2N placing m
// particles of exp(alpha * partial tilt); suffix[2N+1][0] = 0.
// Immutable once built; safe to share across threads.
class TiltedDP {
 public:
  explicit TiltedDP(const TiltedMeasureSpec& spec);

  const TiltedMeasureSpec& spec() const { return spec_; }
  double weight(int x) const { return w_[x - 1]; }

  // log mu_N(e^{alpha a_theta}) = suffix[1][N] - log C(2N,N).
  double log_partition() const;

  // Exact sequential sample from nu^{N,alpha,theta} (non-MCMC).
  ParticleConfiguration sample(Rng& rng) const;

  // nu(eta(x)) in [-1,1], exactly, via prefix+suffix conditioning.
  double marginal(int x) const;

 private:
  double suffix(int x, int m) const { return suffix_[idx(x, m)]; }
  std::size_t idx(int x, int m) const {
    return static_cast<std::size_t>(x - 1) * (spec_.half_size + 1) + m;
  }
  void ensure_prefix() const;

  TiltedMeasureSpec spec_;
  std::vector<double> w_;
  std::vector<double> suffix_;
  mutable std::once_flag prefix_once_;
  mutable std::vector<double> prefix_;
};

double log_partition(const TiltedMeasureSpec& spec);
ParticleConfiguration exact_sample(const TiltedMeasureSpec& spec, Rng& rng);
double marginal(const TiltedMeasureSpec& spec, int x);

// Explicit nu vector over ranked states (enumeration scale only).
StateDistribution tilted_vector(const TiltedMeasureSpec& spec);

struct TvEstimate {
  double value = 0.0;
  double std_error = 0.0;  // zero in exact mode
  uint64_t samples = 0;
};

// ||nu - mu||_TV by enumeration; requires N <= 6.
TvEstimate tv_to_uniform_exact(const TiltedMeasureSpec& spec);

// Plug-in mean of (1/2)|d nu/d mu - 1| over uniform samples. Deterministic
// for fixed seed, independent of thread count (fixed chunked substreams).
TvEstimate tv_to_uniform_mc(const TiltedMeasureSpec& spec, uint64_t n,
                            uint64_t seed, unsigned threads = 1);

// Lipschitz concentration harness (Azuma-type bound
// 2 exp(-s^2 / (8 K ||f||_lip^2)), K = support size).
struct LipschitzFunctional {
  enum class Kind { a_theta, window_sum };
  Kind kind = Kind::a_theta;
  double theta = 0.0;  // a_theta only
  int window_start = 1;
  int window_len = 0;  // window_sum only
  double lipschitz = 1.0;

  int support_size(int half_size) const;
};

struct TailCheckRow {
  double s = 0.0;
  double bound = 0.0;
  double frequency = 0.0;
  double wilson_low = 0.0;
  double wilson_high = 0.0;
  bool pass = false;
};

struct TailCheckReport {
  std::vector<TailCheckRow> rows;
  bool pass = false;
  double center = 0.0;  // exact mean used for centering
};

enum class SourceDistribution { uniform, tilted };

TailCheckReport lipschitz_tail_check(const LipschitzFunctional& f,
                                     const TiltedMeasureSpec& spec,
                                     SourceDistribution source, uint64_t n,
                                     uint64_t seed,
                                     const std::vector<double>& s_grid = {});

// KS distance of a_theta(eta)/sqrt(N) over n uniform draws to the standard
// normal. n must be at least 10^4.
double clt_check(int half_size, double theta, uint64_t n, uint64_t seed,
                 unsigned threads = 1);

}  // namespace sep
