#include "sep/exact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "sep/spectral.hpp"
#include "sep/util.hpp"

namespace sep {

GeneratorMatrix::GeneratorMatrix(int half_size) : n_half_(half_size) {
  if (half_size > 7)
    throw std::invalid_argument("generator enumeration capped at N <= 7");
  int n2 = 2 * half_size;
  uint64_t states = binomial(n2, half_size);
  diag_.assign(states, 0.0);
  rows_.resize(states);
  std::vector<int> s;
  for (uint64_t r = 0; r < states; ++r) {
    ParticleConfiguration eta = unrank(half_size, r);
    s = eta.spins();
    for (int x = 1; x <= n2; ++x) {
      int xr = x % n2;  // site x+1, 0-based
      if (s[x - 1] == s[xr]) continue;  // no-op swap
      std::swap(s[x - 1], s[xr]);
      uint64_t target = rank(ParticleConfiguration(half_size, s));
      std::swap(s[x - 1], s[xr]);
      bool merged = false;
      for (auto& [col, rate] : rows_[r]) {
        if (col == target) {
          rate += 1.0;
          merged = true;
          break;
        }
      }
      if (!merged) rows_[r].push_back({static_cast<uint32_t>(target), 1.0});
      diag_[r] -= 1.0;
    }
  }
}

GeneratorMatrix build_generator(int half_size) {
  return GeneratorMatrix(half_size);
}

void GeneratorMatrix::apply_transition(std::vector<double>& v,
                                       std::vector<double>& scratch) const {
  double inv_rate = 1.0 / uniformization_rate();
  scratch.assign(v.size(), 0.0);
  for (std::size_t r = 0; r < v.size(); ++r) {
    double vr = v[r];
    scratch[r] += vr * (1.0 + diag_[r] * inv_rate);
    if (vr == 0.0) continue;
    for (const auto& [col, rate] : rows_[r]) scratch[col] += vr * rate * inv_rate;
  }
  v.swap(scratch);
}

StateDistribution semigroup_apply(const GeneratorMatrix& gen,
                                  const StateDistribution& initial, double t,
                                  int extra_terms) {
  if (t < 0) throw std::invalid_argument("negative time");
  if (initial.half_size() != gen.half_size())
    throw std::invalid_argument("dimension mismatch");
  std::vector<double> v = initial.data();
  double mu = gen.uniformization_rate() * t;
  if (mu == 0.0) return StateDistribution(gen.half_size(), v);

  int k_hi = static_cast<int>(std::ceil(mu + 12.0 * std::sqrt(mu) + 30.0)) +
             extra_terms;
  std::vector<double> weight(k_hi + 1);
  double total = 0.0;
  for (int k = 0; k <= k_hi; ++k) {
    double logw = k * std::log(mu) - mu - std::lgamma(k + 1.0);
    weight[k] = std::exp(logw);
    total += weight[k];
  }
  // Renormalizing the truncated Poisson weights keeps the output an exact
  // probability vector; tail mass is < 1e-12 by the choice of k_hi.
  for (double& w : weight) w /= total;

  std::vector<double> acc(v.size(), 0.0), scratch;
  for (int k = 0; k <= k_hi; ++k) {
    if (weight[k] > 0.0)
      for (std::size_t i = 0; i < v.size(); ++i) acc[i] += weight[k] * v[i];
    if (k < k_hi) gen.apply_transition(v, scratch);
  }
  return StateDistribution(gen.half_size(), std::move(acc));
}

StateDistribution distribution_at(const ParticleConfiguration& chi, double t,
                                  const GeneratorMatrix& gen,
                                  int extra_terms) {
  if (gen.half_size() > 6)
    throw std::invalid_argument("distribution_at capped at N <= 6");
  std::vector<double> v(gen.states(), 0.0);
  v[rank(chi)] = 1.0;
  return semigroup_apply(gen, StateDistribution(gen.half_size(), std::move(v)),
                         t, extra_terms);
}

StateDistribution uniform_distribution(int half_size) {
  uint64_t states = binomial(2 * half_size, half_size);
  return StateDistribution(
      half_size, std::vector<double>(states, 1.0 / static_cast<double>(states)));
}

uint64_t dihedral_canonical_rank(const ParticleConfiguration& chi) {
  int n2 = chi.size();
  std::vector<int> s = chi.spins(), img(n2);
  uint64_t best = ~uint64_t{0};
  for (int refl = 0; refl < 2; ++refl) {
    for (int shift = 0; shift < n2; ++shift) {
      for (int x = 0; x < n2; ++x) {
        int src = refl ? (n2 - x + shift) % n2 : (x + shift) % n2;
        img[x] = s[src];
      }
      best = std::min(best, rank(ParticleConfiguration(chi.half_size(), img)));
    }
  }
  return best;
}

namespace {

std::vector<uint64_t> dihedral_orbit_reps(int half_size) {
  uint64_t states = binomial(2 * half_size, half_size);
  std::vector<uint64_t> reps;
  for (uint64_t r = 0; r < states; ++r)
    if (dihedral_canonical_rank(unrank(half_size, r)) == r) reps.push_back(r);
  return reps;
}

}  // namespace

double exact_distance_profile(int half_size, double t) {
  if (half_size > 5)
    throw std::invalid_argument("exact distance profile capped at N <= 5");
  GeneratorMatrix gen(half_size);
  StateDistribution uniform = uniform_distribution(half_size);
  double worst = 0.0;
  for (uint64_t r : dihedral_orbit_reps(half_size)) {
    double d = tv_distance(distribution_at(unrank(half_size, r), t, gen), uniform);
    worst = std::max(worst, d);
  }
  return worst;
}

std::vector<uint64_t> distance_profile_argmax(int half_size, double t) {
  if (half_size > 5)
    throw std::invalid_argument("exact distance profile capped at N <= 5");
  GeneratorMatrix gen(half_size);
  StateDistribution uniform = uniform_distribution(half_size);
  double worst = -1.0;
  std::vector<uint64_t> arg;
  for (uint64_t r : dihedral_orbit_reps(half_size)) {
    double d = tv_distance(distribution_at(unrank(half_size, r), t, gen), uniform);
    if (d > worst + 1e-12) {
      worst = d;
      arg.assign(1, r);
    } else if (std::abs(d - worst) <= 1e-12) {
      arg.push_back(r);
    }
  }
  return arg;
}

std::vector<TiltedComparisonRow> verify_tilted_approximation(
    int half_size, const ParticleConfiguration& chi,
    const std::vector<double>& t_grid) {
  if (half_size > 5)
    throw std::invalid_argument("tilted comparison capped at N <= 5");
  GeneratorMatrix gen(half_size);
  StateDistribution uniform = uniform_distribution(half_size);
  ModeProjection m1 = slow_mode(chi);
  double lambda = eigenvalue(1, half_size);
  std::vector<TiltedComparisonRow> rows;
  for (double t : t_grid) {
    TiltedComparisonRow row;
    row.t = t;
    row.alpha = m1.coeff * std::exp(-lambda * t);
    StateDistribution pt = distribution_at(chi, t, gen);
    StateDistribution nu = tilted_vector({half_size, row.alpha, m1.phase});
    row.tv_tilted = tv_distance(pt, nu);
    row.tv_uniform = tv_distance(pt, uniform);
    rows.push_back(row);
  }
  return rows;
}

std::vector<TiltEvolutionRow> verify_tilt_evolution(
    int half_size, double alpha, const std::vector<double>& t_grid) {
  if (half_size > 5)
    throw std::invalid_argument("tilt evolution capped at N <= 5");
  GeneratorMatrix gen(half_size);
  double lambda = eigenvalue(1, half_size);
  StateDistribution nu0 = tilted_vector({half_size, alpha, 0.0});
  std::vector<TiltEvolutionRow> rows;
  for (double t : t_grid) {
    StateDistribution evolved = semigroup_apply(gen, nu0, t);
    StateDistribution target =
        tilted_vector({half_size, alpha * std::exp(-lambda * t), 0.0});
    rows.push_back({t, tv_distance(evolved, target)});
  }
  return rows;
}

double spectral_gap(int half_size) {
  if (half_size > 5)
    throw std::invalid_argument("spectral gap solve capped at N <= 5");
  GeneratorMatrix gen(half_size);
  std::size_t n = gen.states();
  Eigen::MatrixXd minus_q = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    minus_q(r, r) = -gen.diagonal(r);
    for (const auto& [col, rate] : gen.row(r)) minus_q(r, col) -= rate;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(minus_q);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigensolver failed");
  return solver.eigenvalues()(1);  // ascending; (0) is the zero mode
}

}  // namespace sep
