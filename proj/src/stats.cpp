#include "sep/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace sep {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / M_SQRT2); }

namespace {

double chi_square_upper_tail(double statistic, double dof) {
  if (statistic <= 0.0) return 1.0;
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

}  // namespace

double chi_square_pvalue(const std::vector<uint64_t>& counts,
                         const std::vector<double>& probs) {
  if (counts.size() != probs.size() || counts.empty())
    throw std::invalid_argument("counts/probs mismatch");
  double n = 0.0;
  for (uint64_t c : counts) n += static_cast<double>(c);
  double stat = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    double e = n * probs[i];
    if (e <= 0.0) {
      if (counts[i] != 0) return 0.0;
      continue;
    }
    double d = counts[i] - e;
    stat += d * d / e;
  }
  return chi_square_upper_tail(stat, static_cast<double>(counts.size() - 1));
}

double chi_square_two_sample_pvalue(const std::vector<uint64_t>& a,
                                    const std::vector<uint64_t>& b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("sample size mismatch");
  double na = 0.0, nb = 0.0;
  for (uint64_t c : a) na += static_cast<double>(c);
  for (uint64_t c : b) nb += static_cast<double>(c);
  double stat = 0.0;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double pooled = a[i] + static_cast<double>(b[i]);
    if (pooled == 0.0) continue;
    ++cells;
    double ea = na * pooled / (na + nb);
    double eb = nb * pooled / (na + nb);
    double da = a[i] - ea, db = b[i] - eb;
    stat += da * da / ea + db * db / eb;
  }
  if (cells < 2) return 1.0;
  return chi_square_upper_tail(stat, static_cast<double>(cells - 1));
}

double ks_distance(std::vector<double> sample, double (*cdf)(double)) {
  if (sample.empty()) throw std::invalid_argument("empty sample");
  std::sort(sample.begin(), sample.end());
  double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double f = cdf(sample[i]);
    d = std::max(d, std::max((i + 1) / n - f, f - i / n));
  }
  return d;
}

double ks_distance_standard_normal(std::vector<double> sample) {
  return ks_distance(std::move(sample), &normal_cdf);
}

std::pair<double, double> wilson_interval(uint64_t successes, uint64_t n,
                                          double z) {
  if (n == 0) throw std::invalid_argument("empty sample");
  double p = static_cast<double>(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double freedman_diaconis_width(std::vector<double> pooled) {
  if (pooled.size() < 4) throw std::invalid_argument("sample too small");
  std::sort(pooled.begin(), pooled.end());
  auto quantile = [&](double q) {
    double pos = q * (pooled.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    double frac = pos - lo;
    if (lo + 1 >= pooled.size()) return pooled.back();
    return pooled[lo] * (1.0 - frac) + pooled[lo + 1] * frac;
  };
  double iqr = quantile(0.75) - quantile(0.25);
  if (iqr <= 0.0) iqr = (pooled.back() - pooled.front()) / 4.0;
  double h = 2.0 * iqr * std::pow(static_cast<double>(pooled.size()), -1.0 / 3.0);
  if (h <= 0.0) h = 1.0;
  return h;
}

BinnedTv binned_tv(const std::vector<double>& a, const std::vector<double>& b,
                   double h) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty sample");
  if (h <= 0.0) throw std::invalid_argument("bin width must be positive");
  double lo = std::min(*std::min_element(a.begin(), a.end()),
                       *std::min_element(b.begin(), b.end()));
  auto bin_of = [&](double x) {
    return static_cast<std::size_t>(std::floor((x - lo) / h));
  };
  double hi = std::max(*std::max_element(a.begin(), a.end()),
                       *std::max_element(b.begin(), b.end()));
  std::size_t nbins = bin_of(hi) + 1;
  std::vector<double> pa(nbins, 0.0), pb(nbins, 0.0);
  for (double x : a) pa[bin_of(x)] += 1.0 / a.size();
  for (double x : b) pb[bin_of(x)] += 1.0 / b.size();

  BinnedTv out;
  out.bin_width = h;
  out.bins = nbins;
  double l1 = 0.0;
  // Linearized variance: TV = (1/2) sum_k s_k (pa_k - pb_k) with fixed signs;
  // each signed sum is a bounded mean, variance (1 - m^2)/n.
  double ma = 0.0, mb = 0.0;
  for (std::size_t k = 0; k < nbins; ++k) {
    double d = pa[k] - pb[k];
    l1 += std::abs(d);
    double s = d >= 0.0 ? 1.0 : -1.0;
    ma += s * pa[k];
    mb += s * pb[k];
  }
  out.value = 0.5 * l1;
  out.std_error = 0.5 * std::sqrt((1.0 - ma * ma) / a.size() +
                                  (1.0 - mb * mb) / b.size());
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
  double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace sep
