#include "sep/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace sep {

DensityField::DensityField(int half_size, std::vector<double> values)
    : n_half_(half_size), v_(std::move(values)) {
  if (half_size < 1) throw std::invalid_argument("half_size must be >= 1");
  if (v_.size() != static_cast<std::size_t>(2 * half_size))
    throw std::invalid_argument("field length must be 2N");
  double s = 0.0;
  for (double x : v_) s += x;
  if (std::abs(s) > 1e-10 * (1.0 + 2.0 * half_size))
    throw std::invalid_argument("field must sum to zero");
}

DensityField::DensityField(const ParticleConfiguration& chi)
    : n_half_(chi.half_size()), v_(chi.size()) {
  if (!chi.balanced())
    throw std::invalid_argument("density field needs a balanced configuration");
  for (int x = 1; x <= chi.size(); ++x) v_[x - 1] = chi.spin(x);
}

double eigenvalue(int mode, int half_size) {
  if (mode < 1 || mode > half_size) throw std::out_of_range("mode out of range");
  return 2.0 * (1.0 - std::cos(mode * M_PI / half_size));
}

std::vector<ModeProjection> fourier_decompose(const DensityField& field) {
  int n = field.half_size(), n2 = field.size();
  std::vector<ModeProjection> modes(n);
  for (int i = 1; i < n; ++i) {
    double c = 0.0, s = 0.0;
    for (int x = 1; x <= n2; ++x) {
      double arg = i * M_PI * x / n;
      c += field.value(x) * std::cos(arg);
      s += field.value(x) * std::sin(arg);
    }
    double r = std::hypot(c, s);
    ModeProjection& m = modes[i - 1];
    m.mode = i;
    if (r < 1e-9) {
      m.phase = 0.0;
      m.coeff = 0.0;
    } else {
      // theta solves: cos-projection zero, sin-projection positive.
      double th = std::atan2(c, s);
      if (th < 0) th += 2.0 * M_PI;
      if (2.0 * M_PI - th < 1e-9) th = 0.0;  // keep [0, 2pi), snap jitter
      m.phase = th;
      m.coeff = r / n;
    }
  }
  double bn = 0.0;
  for (int x = 1; x <= n2; ++x)
    bn += (x & 1 ? -1.0 : 1.0) * field.value(x);
  modes[n - 1] = {n, 0.0, bn / n2};
  return modes;
}

std::vector<ModeProjection> fourier_decompose(const ParticleConfiguration& chi) {
  return fourier_decompose(DensityField(chi));
}

DensityField fourier_synthesize(int half_size,
                                const std::vector<ModeProjection>& modes) {
  int n2 = 2 * half_size;
  std::vector<double> v(n2, 0.0);
  for (const ModeProjection& m : modes) {
    if (m.coeff == 0.0) continue;
    if (m.mode == half_size) {
      for (int x = 1; x <= n2; ++x)
        v[x - 1] += m.coeff * (x & 1 ? -1.0 : 1.0);
    } else {
      for (int x = 1; x <= n2; ++x)
        v[x - 1] += m.coeff * std::sin(m.mode * M_PI * x / half_size + m.phase);
    }
  }
  return DensityField(half_size, std::move(v));
}

DensityField heat_solve(const DensityField& u0, double t) {
  if (t < 0) throw std::invalid_argument("negative time");
  auto modes = fourier_decompose(u0);
  for (ModeProjection& m : modes)
    m.coeff *= std::exp(-eigenvalue(m.mode, u0.half_size()) * t);
  return fourier_synthesize(u0.half_size(), modes);
}

ModeProjection slow_mode(const ParticleConfiguration& chi) {
  return fourier_decompose(chi)[0];
}

double sinusoid_residual(const ParticleConfiguration& chi, double t) {
  if (t < 0) throw std::invalid_argument("negative time");
  int n = chi.half_size();
  DensityField ut = heat_solve(DensityField(chi), t);
  ModeProjection m1 = slow_mode(chi);
  double decay = std::exp(-eigenvalue(1, n) * t);
  double worst = 0.0;
  for (int x = 1; x <= chi.size(); ++x) {
    double sinusoid = decay * m1.coeff * std::sin(M_PI * x / n + m1.phase);
    worst = std::max(worst, std::abs(ut.value(x) - sinusoid));
  }
  return worst;
}

double mixing_schedule(int half_size, double s) {
  if (half_size < 2) throw std::invalid_argument("half_size must be >= 2");
  double n2 = static_cast<double>(half_size) * half_size;
  return n2 / (2.0 * M_PI * M_PI) * std::log(static_cast<double>(half_size)) +
         n2 / (M_PI * M_PI) * s;
}

double cutoff_profile(double s) {
  return std::erf(M_SQRT2 / M_PI * std::exp(-s));
}

double cutoff_profile_density(double s, double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::invalid_argument("density must lie in (0,1]");
  double amp = std::sin(alpha * M_PI / 2.0) /
               (M_PI * std::sqrt(alpha * (1.0 - alpha / 2.0)));
  return std::erf(amp * std::exp(-s));
}

double cutoff_profile_sparse(double s) {
  return std::erf(0.5 * std::exp(-s));
}

}  // namespace sep
