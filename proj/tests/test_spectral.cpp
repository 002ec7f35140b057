#include <doctest.h>

#include <cmath>
#include <vector>

#include "sep/lattice.hpp"
#include "sep/rng.hpp"
#include "sep/spectral.hpp"
#include "sep/util.hpp"

using namespace sep;

namespace {

ParticleConfiguration zigzag(int n) {
  std::vector<int> s(2 * n);
  for (int x = 1; x <= 2 * n; ++x) s[x - 1] = (x & 1) ? +1 : -1;
  return ParticleConfiguration(n, s);
}

// Independent oracle: classic RK4 on du/dt = u(x+1) + u(x-1) - 2u(x).
std::vector<double> heat_rk4(std::vector<double> u, double t, double dt) {
  int m = static_cast<int>(u.size());
  auto lap = [&](const std::vector<double>& v) {
    std::vector<double> d(m);
    for (int i = 0; i < m; ++i)
      d[i] = v[(i + 1) % m] + v[(i + m - 1) % m] - 2.0 * v[i];
    return d;
  };
  int steps = static_cast<int>(std::ceil(t / dt));
  double h = t / steps;
  std::vector<double> k1, k2, k3, k4, tmp(m);
  for (int s = 0; s < steps; ++s) {
    k1 = lap(u);
    for (int i = 0; i < m; ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
    k2 = lap(tmp);
    for (int i = 0; i < m; ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
    k3 = lap(tmp);
    for (int i = 0; i < m; ++i) tmp[i] = u[i] + h * k3[i];
    k4 = lap(tmp);
    for (int i = 0; i < m; ++i)
      u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return u;
}

DensityField sine_field(int n, double amplitude, double theta) {
  std::vector<double> v(2 * n);
  for (int x = 1; x <= 2 * n; ++x)
    v[x - 1] = amplitude * std::sin(M_PI * x / n + theta);
  return DensityField(n, v);
}

double circular_diff(double a, double b) {
  double d = std::fmod(std::abs(a - b), 2.0 * M_PI);
  return std::min(d, 2.0 * M_PI - d);
}

}  // namespace

TEST_CASE("eigenvalues") {
  CHECK(eigenvalue(1, 2) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(eigenvalue(4, 4) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(eigenvalue(1, 3) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(eigenvalue(0, 4), std::out_of_range);
  CHECK_THROWS_AS(eigenvalue(5, 4), std::out_of_range);
}

TEST_CASE("decomposition of pure fields") {
  int n = 8;
  auto modes = fourier_decompose(sine_field(n, 1.0, 0.0));
  CHECK(modes[0].coeff == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(modes[0].phase == doctest::Approx(0.0).epsilon(1e-9));
  for (int i = 2; i <= n; ++i)
    CHECK(std::abs(modes[i - 1].coeff) < 1e-12);

  auto zz = fourier_decompose(zigzag(6));
  CHECK(zz[5].coeff == doctest::Approx(-1.0).epsilon(1e-12));
  for (int i = 1; i < 6; ++i) CHECK(std::abs(zz[i - 1].coeff) < 1e-12);

  auto wm = fourier_decompose(worst_case(2));
  CHECK(wm[0].phase == doctest::Approx(7.0 * M_PI / 4.0).epsilon(1e-12));
  CHECK(wm[0].coeff == doctest::Approx(M_SQRT2).epsilon(1e-12));
}

TEST_CASE("mode invariants: defining system and bounds") {
  Rng rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 2 + static_cast<int>(rng.below(9));
    ParticleConfiguration chi = uniform_sample(n, n, rng);
    auto modes = fourier_decompose(chi);
    for (int i = 1; i <= n; ++i) {
      const ModeProjection& m = modes[i - 1];
      if (i < n) {
        CHECK(m.coeff >= 0.0);
        CHECK(m.coeff <= 2.0 + 1e-12);
        if (m.coeff > 0.0) {
          double cos_sum = 0.0, sin_sum = 0.0;
          for (int x = 1; x <= 2 * n; ++x) {
            cos_sum += chi.spin(x) * std::cos(i * M_PI * x / n + m.phase);
            sin_sum += chi.spin(x) * std::sin(i * M_PI * x / n + m.phase);
          }
          CHECK(std::abs(cos_sum) < 1e-9);
          CHECK(sin_sum > 0.0);
        }
      } else {
        CHECK(std::abs(m.coeff) <= 1.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("decompose/synthesize round-trip") {
  for (uint64_t r = 0; r < binomial(6, 3); ++r) {
    ParticleConfiguration chi = unrank(3, r);
    DensityField f(chi);
    DensityField back = fourier_synthesize(3, fourier_decompose(f));
    for (int x = 1; x <= 6; ++x)
      CHECK(std::abs(back.value(x) - f.value(x)) < 1e-9);
  }
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    ParticleConfiguration chi = uniform_sample(32, 32, rng);
    DensityField f(chi);
    DensityField back = fourier_synthesize(32, fourier_decompose(f));
    for (int x = 1; x <= 64; ++x)
      CHECK(std::abs(back.value(x) - f.value(x)) < 1e-9);
  }
}

TEST_CASE("heat solve: eigenfunction decay, identity at t=0, ODE oracle") {
  int n = 8;
  double theta = 0.7;
  DensityField u0 = sine_field(n, 0.9, theta);
  double t = 1.7;
  DensityField ut = heat_solve(u0, t);
  double decay = std::exp(-eigenvalue(1, n) * t);
  for (int x = 1; x <= 2 * n; ++x)
    CHECK(ut.value(x) == doctest::Approx(decay * u0.value(x)).epsilon(1e-12));

  DensityField same = heat_solve(u0, 0.0);
  for (int x = 1; x <= 2 * n; ++x)
    CHECK(same.value(x) == doctest::Approx(u0.value(x)).epsilon(1e-12));

  DensityField cm(worst_case(4));
  DensityField exact = heat_solve(cm, 1.0);
  std::vector<double> ode = heat_rk4(cm.data(), 1.0, 1e-4);
  for (int x = 0; x < 8; ++x)
    CHECK(std::abs(exact.data()[x] - ode[x]) < 1e-8);

  CHECK_THROWS_AS(heat_solve(u0, -0.1), std::invalid_argument);
}

TEST_CASE("heat solve invariants: conservation, contraction, semigroup, modewise decay") {
  Rng rng(13);
  ParticleConfiguration chi = uniform_sample(12, 12, rng);
  DensityField u0(chi);
  double prev_max = 1e300;
  for (double t : {0.0, 0.3, 1.0, 3.0, 10.0, 40.0}) {
    DensityField ut = heat_solve(u0, t);
    double total = 0.0, peak = 0.0;
    for (double v : ut.data()) {
      total += v;
      peak = std::max(peak, std::abs(v));
    }
    CHECK(std::abs(total) < 1e-10);
    CHECK(peak <= prev_max + 1e-12);
    prev_max = peak;
  }
  // semigroup property
  DensityField ab = heat_solve(heat_solve(u0, 0.8), 1.9);
  DensityField once = heat_solve(u0, 2.7);
  for (int x = 1; x <= 24; ++x)
    CHECK(std::abs(ab.value(x) - once.value(x)) < 1e-8);
  // exact modewise decay
  auto before = fourier_decompose(u0);
  auto after = fourier_decompose(heat_solve(u0, 1.3));
  for (int i = 1; i <= 12; ++i) {
    double expected = before[i - 1].coeff * std::exp(-eigenvalue(i, 12) * 1.3);
    // phases of surviving modes unchanged, coefficients decay exactly
    if (std::abs(expected) > 1e-7) {
      CHECK(after[i - 1].coeff == doctest::Approx(expected).epsilon(1e-10));
      CHECK(circular_diff(after[i - 1].phase, before[i - 1].phase) < 1e-9);
    }
  }
}

TEST_CASE("sinusoid residual bounds") {
  int n = 8;
  Rng rng(21);
  // bound 4 e^{-2 lambda t} for t >= 1/lambda, on random states
  double lambda = eigenvalue(1, n);
  for (int trial = 0; trial < 100; ++trial) {
    ParticleConfiguration c = uniform_sample(n, n, rng);
    for (double factor : {1.0, 1.5, 2.0, 4.0}) {
      double t = factor / lambda;
      CHECK(sinusoid_residual(c, t) <= 4.0 * std::exp(-2.0 * lambda * t) + 1e-12);
    }
  }
  // and 4 N^{-1/2} at t = (1/4) lambda^{-1} log N
  for (int nn : {16, 32}) {
    double lam = eigenvalue(1, nn);
    double t = 0.25 * std::log(static_cast<double>(nn)) / lam;
    for (int trial = 0; trial < 20; ++trial) {
      ParticleConfiguration c = uniform_sample(nn, nn, rng);
      CHECK(sinusoid_residual(c, t) <=
            4.0 / std::sqrt(static_cast<double>(nn)) + 1e-12);
    }
  }
}

TEST_CASE("pure mode-1 field has zero residual via heat route") {
  // sanity: a field equal to its own slow-mode sinusoid
  int n = 6;
  DensityField f = sine_field(n, 1.3, 2.1);
  DensityField ut = heat_solve(f, 2.0);
  double decay = std::exp(-eigenvalue(1, n) * 2.0);
  for (int x = 1; x <= 2 * n; ++x)
    CHECK(std::abs(ut.value(x) - decay * f.value(x)) < 1e-12);
}

TEST_CASE("mixing schedule") {
  CHECK(mixing_schedule(4, 0.0) == doctest::Approx(1.1236).epsilon(1e-3));
  double slope = mixing_schedule(7, 1.0) - mixing_schedule(7, 0.0);
  CHECK(slope == doctest::Approx(49.0 / (M_PI * M_PI)).epsilon(1e-12));
  CHECK(mixing_schedule(7, 2.0) - mixing_schedule(7, 1.0) ==
        doctest::Approx(slope).epsilon(1e-12));
  int n = 1000;
  double ratio = eigenvalue(1, n) * mixing_schedule(n, 0.0) /
                 (0.5 * std::log(static_cast<double>(n)));
  CHECK(std::abs(ratio - 1.0) < 0.05);
  CHECK_THROWS_AS(mixing_schedule(1, 0.0), std::invalid_argument);
}

TEST_CASE("cutoff profile functions") {
  // quadrature oracle for erf on the relevant arguments
  auto erf_quad = [](double z) {
    int steps = 4000;
    double h = z / steps, acc = 0.0;
    for (int i = 0; i < steps; ++i) {
      double a = i * h, b = (i + 1) * h, m = 0.5 * (a + b);
      acc += h / 6.0 *
             (std::exp(-a * a) + 4.0 * std::exp(-m * m) + std::exp(-b * b));
    }
    return 2.0 / std::sqrt(M_PI) * acc;
  };
  CHECK(cutoff_profile(0.0) == doctest::Approx(0.47563).epsilon(2e-4));
  CHECK(cutoff_profile(0.0) ==
        doctest::Approx(erf_quad(M_SQRT2 / M_PI)).epsilon(1e-10));
  CHECK(cutoff_profile(-1.0) ==
        doctest::Approx(erf_quad(M_SQRT2 / M_PI * std::exp(1.0))).epsilon(1e-10));

  for (double s : {-2.0, -0.5, 0.0, 0.7, 3.0})
    CHECK(cutoff_profile_density(s, 1.0) ==
          doctest::Approx(cutoff_profile(s)).epsilon(1e-12));
  CHECK(cutoff_profile(9.0) < 1e-4);
  CHECK(cutoff_profile(-9.0) > 1.0 - 1e-9);
  CHECK(cutoff_profile_sparse(0.0) ==
        doctest::Approx(std::erf(0.5)).epsilon(1e-15));
  CHECK_THROWS_AS(cutoff_profile_density(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cutoff_profile_density(0.0, 1.2), std::invalid_argument);
}
