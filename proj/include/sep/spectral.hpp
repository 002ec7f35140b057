#pragma once

#include <vector>

#include "sep/lattice.hpp"

namespace sep {

// One Fourier mode of a zero-sum field on Z_{2N}: for i < N the pair
// (theta_i, b_i) with b_i >= 0; mode N is the alternating mode with a
// signed coefficient and phase fixed to 0.
struct ModeProjection {
  int mode = 0;
  double phase = 0.0;
  double coeff = 0.0;
};

// Zero-sum real field on Z_{2N} (expected particle density u(x,t), with
// empty sites counting -1).
class DensityField {
 public:
  DensityField(int half_size, std::vector<double> values);
  explicit DensityField(const ParticleConfiguration& chi);

  int half_size() const { return n_half_; }
  int size() const { return 2 * n_half_; }
  double value(int x) const {  // cyclic
    int m = (x - 1) % (2 * n_half_);
    if (m < 0) m += 2 * n_half_;
    return v_[m];
  }
  const std::vector<double>& data() const { return v_; }

 private:
  int n_half_;
  std::vector<double> v_;
};

// lambda_{i,N} = 2(1 - cos(i pi / N)); lambda_N := eigenvalue(1, N).
double eigenvalue(int mode, int half_size);

// All modes i = 1..N via exact projections. Synthesis reproduces the field
// to 1e-9; vanished projections get phase 0. The alternating mode uses the
// (-1)^x convention with x in 1..2N.
std::vector<ModeProjection> fourier_decompose(const DensityField& field);
std::vector<ModeProjection> fourier_decompose(const ParticleConfiguration& chi);

DensityField fourier_synthesize(int half_size,
                                const std::vector<ModeProjection>& modes);

// Heat semigroup by exact Fourier synthesis: each mode decays by
// exp(-lambda_{i,N} t); the alternating mode uses lambda_{N,N} = 4.
DensityField heat_solve(const DensityField& u0, double t);

// (theta(chi), b(chi)): the mode-1 projection of the configuration.
ModeProjection slow_mode(const ParticleConfiguration& chi);

// max_x |u^chi(x,t) - e^{-lambda_N t} b(chi) sin(pi x/N + theta(chi))|.
double sinusoid_residual(const ParticleConfiguration& chi, double t);

// t_{s,N} = N^2/(2 pi^2) log N + N^2/pi^2 s.
double mixing_schedule(int half_size, double s);

// Limit profiles; erf is the std routine (validated against references).
double cutoff_profile(double s);
double cutoff_profile_density(double s, double alpha);  // alpha in (0,1]
double cutoff_profile_sparse(double s);

}  // namespace sep
