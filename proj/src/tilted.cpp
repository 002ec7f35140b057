#include "sep/tilted.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sep/stats.hpp"
#include "sep/util.hpp"

namespace sep {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logaddexp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

std::vector<double> sine_weights(int half_size, double theta) {
  std::vector<double> w(2 * half_size);
  for (int x = 1; x <= 2 * half_size; ++x)
    w[x - 1] = std::sin(M_PI * x / half_size + theta);
  return w;
}

// In-place uniform shuffle sampler for hot loops; spins must hold k '+1'
// entries already (any order).
void shuffle_spins(std::vector<int8_t>& spins, Rng& rng) {
  for (std::size_t i = spins.size() - 1; i > 0; --i) {
    std::size_t j = rng.below(i + 1);
    std::swap(spins[i], spins[j]);
  }
}

}  // namespace

void TiltedMeasureSpec::validate() const {
  if (half_size < 1) throw std::invalid_argument("half_size must be >= 1");
  if (!std::isfinite(alpha)) throw std::invalid_argument("alpha must be finite");
  if (!(theta >= 0.0 && theta < 2.0 * M_PI))
    throw std::invalid_argument("theta must lie in [0, 2pi)");
}

double a_statistic(const ParticleConfiguration& eta, double theta) {
  double n = eta.half_size();
  double s = 0.0;
  for (int x = 1; x <= eta.size(); ++x)
    s += eta.spin(x) * std::sin(M_PI * x / n + theta);
  return s;
}

TiltedDP::TiltedDP(const TiltedMeasureSpec& spec) : spec_(spec) {
  spec_.validate();
  int n = spec_.half_size, n2 = 2 * n;
  w_ = sine_weights(n, spec_.theta);
  suffix_.assign(static_cast<std::size_t>(n2 + 1) * (n + 1), kNegInf);
  suffix_[idx(n2 + 1, 0)] = 0.0;
  for (int x = n2; x >= 1; --x) {
    double aw = spec_.alpha * w_[x - 1];
    int sites_left = n2 - x + 1;
    int m_hi = std::min(n, sites_left);
    for (int m = 0; m <= m_hi; ++m) {
      double take = m >= 1 ? aw + suffix(x + 1, m - 1) : kNegInf;
      double skip = -aw + suffix(x + 1, m);
      suffix_[idx(x, m)] = logaddexp(take, skip);
    }
  }
}

double TiltedDP::log_partition() const {
  int n = spec_.half_size;
  return suffix(1, n) - log_binomial(2 * n, n);
}

ParticleConfiguration TiltedDP::sample(Rng& rng) const {
  int n = spec_.half_size, n2 = 2 * n;
  std::vector<int> s(n2, -1);
  int m = n;
  for (int x = 1; x <= n2; ++x) {
    if (m == 0) break;
    double aw = spec_.alpha * w_[x - 1];
    double logp = aw + suffix(x + 1, m - 1) - suffix(x, m);
    if (rng.uniform01() < std::exp(logp)) {
      s[x - 1] = +1;
      --m;
    }
  }
  return ParticleConfiguration(n, s);
}

void TiltedDP::ensure_prefix() const {
  std::call_once(prefix_once_, [&] {
    int n = spec_.half_size, n2 = 2 * n;
    std::vector<double> f(static_cast<std::size_t>(n2 + 1) * (n + 1), kNegInf);
    auto fidx = [&](int x, int j) {
      return static_cast<std::size_t>(x - 1) * (n + 1) + j;
    };
    f[fidx(1, 0)] = 0.0;
    for (int x = 1; x <= n2; ++x) {
      double aw = spec_.alpha * w_[x - 1];
      int j_hi = std::min(n, x);
      for (int j = 0; j <= j_hi; ++j) {
        double take = j >= 1 ? f[fidx(x, j - 1)] + aw : kNegInf;
        double skip = f[fidx(x, j)] - aw;
        f[fidx(x + 1, j)] = logaddexp(take, skip);
      }
    }
    prefix_ = std::move(f);
  });
}

double TiltedDP::marginal(int x) const {
  int n = spec_.half_size, n2 = 2 * n;
  if (x < 1 || x > n2) {
    x = ((x - 1) % n2 + n2) % n2 + 1;  // cyclic
  }
  ensure_prefix();
  auto fidx = [&](int xx, int j) {
    return static_cast<std::size_t>(xx - 1) * (n + 1) + j;
  };
  double aw = spec_.alpha * w_[x - 1];
  double total = suffix(1, n);
  double log_plus = kNegInf;
  for (int j = 0; j <= std::min(n - 1, x - 1); ++j) {
    double rest = suffix(x + 1, n - 1 - j);
    if (rest == kNegInf || prefix_[fidx(x, j)] == kNegInf) continue;
    log_plus = logaddexp(log_plus, prefix_[fidx(x, j)] + aw + rest);
  }
  double p_plus = std::exp(log_plus - total);
  return 2.0 * p_plus - 1.0;
}

double log_partition(const TiltedMeasureSpec& spec) {
  return TiltedDP(spec).log_partition();
}

ParticleConfiguration exact_sample(const TiltedMeasureSpec& spec, Rng& rng) {
  return TiltedDP(spec).sample(rng);
}

double marginal(const TiltedMeasureSpec& spec, int x) {
  return TiltedDP(spec).marginal(x);
}

StateDistribution tilted_vector(const TiltedMeasureSpec& spec) {
  spec.validate();
  int n = spec.half_size;
  if (n > 7) throw std::invalid_argument("enumeration limited to N <= 7");
  uint64_t states = binomial(2 * n, n);
  std::vector<double> logw(states);
  double peak = kNegInf;
  for (uint64_t r = 0; r < states; ++r) {
    logw[r] = spec.alpha * a_statistic(unrank(n, r), spec.theta);
    peak = std::max(peak, logw[r]);
  }
  double z = 0.0;
  for (double& v : logw) {
    v = std::exp(v - peak);
    z += v;
  }
  for (double& v : logw) v /= z;
  return StateDistribution(n, std::move(logw));
}

TvEstimate tv_to_uniform_exact(const TiltedMeasureSpec& spec) {
  spec.validate();
  if (spec.half_size > 6)
    throw std::invalid_argument("exact TV limited to N <= 6");
  StateDistribution nu = tilted_vector(spec);
  uint64_t states = nu.states();
  double uniform = 1.0 / static_cast<double>(states);
  double s = 0.0;
  for (uint64_t r = 0; r < states; ++r) s += std::abs(nu[r] - uniform);
  return {0.5 * s, 0.0, states};
}

TvEstimate tv_to_uniform_mc(const TiltedMeasureSpec& spec, uint64_t n,
                            uint64_t seed, unsigned threads) {
  spec.validate();
  if (n == 0) throw std::invalid_argument("need at least one sample");
  TiltedDP dp(spec);
  double log_z = dp.log_partition();
  int n2 = 2 * spec.half_size;
  std::vector<double> w = sine_weights(spec.half_size, spec.theta);

  // Fixed chunk layout => identical results for any thread count.
  const uint64_t kChunks = 256;
  uint64_t per = (n + kChunks - 1) / kChunks;
  struct Partial {
    double sum = 0.0, sum_sq = 0.0;
    uint64_t count = 0;
  };
  std::vector<Partial> parts(kChunks);
  parallel_for(kChunks, threads, [&](std::size_t c) {
    uint64_t lo = c * per, hi = std::min(n, (c + 1) * per);
    if (lo >= hi) return;
    Rng rng(derive_seed(seed, c));
    std::vector<int8_t> spins(n2, -1);
    std::fill(spins.begin(), spins.begin() + spec.half_size, int8_t{1});
    Partial p;
    for (uint64_t i = lo; i < hi; ++i) {
      shuffle_spins(spins, rng);
      double a = 0.0;
      for (int x = 0; x < n2; ++x) a += spins[x] * w[x];
      double v = 0.5 * std::abs(std::exp(spec.alpha * a - log_z) - 1.0);
      p.sum += v;
      p.sum_sq += v * v;
      ++p.count;
    }
    parts[c] = p;
  });
  double sum = 0.0, sum_sq = 0.0;
  uint64_t count = 0;
  for (const Partial& p : parts) {  // fixed reduction order
    sum += p.sum;
    sum_sq += p.sum_sq;
    count += p.count;
  }
  double m = sum / count;
  double var = (sum_sq - count * m * m) / (count - 1.0);
  return {m, std::sqrt(std::max(0.0, var) / count), count};
}

int LipschitzFunctional::support_size(int half_size) const {
  return kind == Kind::a_theta ? 2 * half_size - 1 : window_len;
}

TailCheckReport lipschitz_tail_check(const LipschitzFunctional& f,
                                     const TiltedMeasureSpec& spec,
                                     SourceDistribution source, uint64_t n,
                                     uint64_t seed,
                                     const std::vector<double>& s_grid) {
  spec.validate();
  if (f.kind == LipschitzFunctional::Kind::window_sum &&
      (f.window_len < 1 || f.window_len > 2 * spec.half_size))
    throw std::invalid_argument("bad window length");

  int n2 = 2 * spec.half_size;
  std::vector<double> w = sine_weights(spec.half_size, f.theta);
  auto evaluate = [&](const ParticleConfiguration& eta) {
    if (f.kind == LipschitzFunctional::Kind::a_theta) {
      double a = 0.0;
      for (int x = 1; x <= n2; ++x) a += eta.spin(x) * w[x - 1];
      return a;
    }
    double s = 0.0;
    for (int j = 0; j < f.window_len; ++j) s += eta.spin(f.window_start + j);
    return s;
  };

  // Exact centering: zero under the uniform measure, marginal sums under nu.
  double center = 0.0;
  std::unique_ptr<TiltedDP> dp;
  if (source == SourceDistribution::tilted) {
    dp = std::make_unique<TiltedDP>(spec);
    if (f.kind == LipschitzFunctional::Kind::a_theta) {
      for (int x = 1; x <= n2; ++x) center += dp->marginal(x) * w[x - 1];
    } else {
      for (int j = 0; j < f.window_len; ++j)
        center += dp->marginal(f.window_start + j);
    }
  }

  Rng rng(seed);
  std::vector<double> deviations(n);
  for (uint64_t i = 0; i < n; ++i) {
    ParticleConfiguration eta =
        source == SourceDistribution::uniform
            ? uniform_sample(spec.half_size, spec.half_size, rng)
            : dp->sample(rng);
    deviations[i] = std::abs(evaluate(eta) - center);
  }

  double k_support = f.support_size(spec.half_size);
  std::vector<double> grid = s_grid;
  if (grid.empty()) {
    for (int j = 0; j <= 8; ++j) grid.push_back(j * std::sqrt(k_support) / 2.0);
  }
  TailCheckReport report;
  report.center = center;
  report.pass = true;
  const double z99 = 2.5758293035489004;  // two-sided 99%
  for (double s : grid) {
    TailCheckRow row;
    row.s = s;
    row.bound =
        2.0 * std::exp(-s * s / (8.0 * k_support * f.lipschitz * f.lipschitz));
    uint64_t exceed = 0;
    for (double d : deviations)
      if (d >= s) ++exceed;
    row.frequency = static_cast<double>(exceed) / n;
    auto [lo, hi] = wilson_interval(exceed, n, z99);
    row.wilson_low = lo;
    row.wilson_high = hi;
    row.pass = lo <= row.bound;
    report.pass = report.pass && row.pass;
    report.rows.push_back(row);
  }
  return report;
}

double clt_check(int half_size, double theta, uint64_t n, uint64_t seed,
                 unsigned threads) {
  if (n < 10000) throw std::invalid_argument("clt_check needs n >= 10^4");
  int n2 = 2 * half_size;
  std::vector<double> w = sine_weights(half_size, theta);
  std::vector<double> sample(n);
  const uint64_t kChunks = 256;
  uint64_t per = (n + kChunks - 1) / kChunks;
  double root_n = std::sqrt(static_cast<double>(half_size));
  parallel_for(kChunks, threads, [&](std::size_t c) {
    uint64_t lo = c * per, hi = std::min(n, (c + 1) * per);
    if (lo >= hi) return;
    Rng rng(derive_seed(seed, c));
    std::vector<int8_t> spins(n2, -1);
    std::fill(spins.begin(), spins.begin() + half_size, int8_t{1});
    for (uint64_t i = lo; i < hi; ++i) {
      shuffle_spins(spins, rng);
      double a = 0.0;
      for (int x = 0; x < n2; ++x) a += spins[x] * w[x];
      sample[i] = a / root_n;
    }
  });
  return ks_distance_standard_normal(std::move(sample));
}

}  // namespace sep
