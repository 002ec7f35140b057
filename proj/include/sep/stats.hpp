#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace sep {

double normal_cdf(double x);

// Pearson goodness-of-fit p-value of observed counts against exact
// probabilities (all cells kept; callers choose designs with adequate
// expected counts).
double chi_square_pvalue(const std::vector<uint64_t>& counts,
                         const std::vector<double>& probs);

// Two-sample Pearson test with pooled expected frequencies.
double chi_square_two_sample_pvalue(const std::vector<uint64_t>& a,
                                    const std::vector<uint64_t>& b);

// Kolmogorov-Smirnov distance of a sample to the standard normal CDF.
double ks_distance_standard_normal(std::vector<double> sample);

// KS distance to an arbitrary CDF.
double ks_distance(std::vector<double> sample, double (*cdf)(double));

// Wilson score interval at confidence given by z (z = 2.5758... for 99%).
std::pair<double, double> wilson_interval(uint64_t successes, uint64_t n,
                                          double z);

struct BinnedTv {
  double value = 0.0;       // (1/2) L1 between binned empirical densities
  double std_error = 0.0;   // linearized plug-in standard error
  double bin_width = 0.0;
  std::size_t bins = 0;
};

// Freedman-Diaconis width on the pooled sample: h = 2 IQR n^{-1/3}.
double freedman_diaconis_width(std::vector<double> pooled);

// TV between two equal-real-weight samples via equal-width bins of width h.
BinnedTv binned_tv(const std::vector<double>& a, const std::vector<double>& b,
                   double h);

double mean(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v);

}  // namespace sep
