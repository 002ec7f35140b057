#pragma once

#include <cstdint>
#include <vector>

#include "sep/lattice.hpp"
#include "sep/tilted.hpp"

namespace sep {

// Sparse exclusion generator over ranked Omega_N: Q[eta -> eta^x] = 1 for
// every swap position x with eta(x) != eta(x+1); diagonal = -(row sum).
// Symmetric (uniform reversibility); multiple swap positions mapping to the
// same target accumulate (happens only at N = 1).
class GeneratorMatrix {
 public:
  explicit GeneratorMatrix(int half_size);

  int half_size() const { return n_half_; }
  std::size_t states() const { return diag_.size(); }
  double diagonal(std::size_t r) const { return diag_[r]; }

  // off-diagonal entries of row r as (column, rate) pairs
  const std::vector<std::pair<uint32_t, double>>& row(std::size_t r) const {
    return rows_[r];
  }

  double uniformization_rate() const { return 2.0 * n_half_; }

  // v <- v P where P = I + Q/Lambda (v is a probability row vector; Q is
  // symmetric so left and right actions coincide).
  void apply_transition(std::vector<double>& v, std::vector<double>& scratch) const;

 private:
  int n_half_;
  std::vector<double> diag_;
  std::vector<std::vector<std::pair<uint32_t, double>>> rows_;
};

GeneratorMatrix build_generator(int half_size);  // N <= 7

// exp(tQ) applied to an initial distribution by uniformization with
// Poisson-weight truncation (absolute tail mass <= 1e-12); extra_terms
// extends the truncation for stability audits.
StateDistribution semigroup_apply(const GeneratorMatrix& gen,
                                  const StateDistribution& initial, double t,
                                  int extra_terms = 0);

// Row P^chi_t of the semigroup. N <= 6.
StateDistribution distribution_at(const ParticleConfiguration& chi, double t,
                                  const GeneratorMatrix& gen,
                                  int extra_terms = 0);

StateDistribution uniform_distribution(int half_size);

// d^N(t): worst-case TV to uniform, maximized over dihedral orbit
// representatives. N <= 5.
double exact_distance_profile(int half_size, double t);

// Initial states achieving the maximum above (ranks of orbit reps).
std::vector<uint64_t> distance_profile_argmax(int half_size, double t);

struct TiltedComparisonRow {
  double t = 0.0;
  double alpha = 0.0;       // b(chi) e^{-lambda_N t}
  double tv_tilted = 0.0;   // TV(P^chi_t, nu^{N,alpha,theta(chi)})
  double tv_uniform = 0.0;  // TV(P^chi_t, mu_N)
};

// Pre-equilibrium tilted-family comparison at enumeration scale. N <= 5.
std::vector<TiltedComparisonRow> verify_tilted_approximation(
    int half_size, const ParticleConfiguration& chi,
    const std::vector<double>& t_grid);

struct TiltEvolutionRow {
  double t = 0.0;
  double tv = 0.0;  // TV(nu^alpha_t, nu^{alpha e^{-lambda_N t}})
};

// Tilt-evolution check: evolved tilt vs statically decayed tilt. N <= 5.
std::vector<TiltEvolutionRow> verify_tilt_evolution(
    int half_size, double alpha, const std::vector<double>& t_grid);

// Second-smallest eigenvalue of -L_N via dense symmetric eigensolve;
// equals 2(1 - cos(pi/N)). N <= 5.
double spectral_gap(int half_size);

// Canonical representative rank under the dihedral action on Z_{2N}.
uint64_t dihedral_canonical_rank(const ParticleConfiguration& chi);

}  // namespace sep
