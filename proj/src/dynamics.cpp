#include "sep/dynamics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sep/spectral.hpp"
#include "sep/util.hpp"

namespace sep {

CornerFlipEngine::CornerFlipEngine(std::vector<HeightFunction> initial,
                                   ClockRealization& clocks)
    : clocks_(clocks) {
  if (initial.empty()) throw std::invalid_argument("no trajectories");
  n_half_ = initial[0].half_size();
  n2_ = 2 * n_half_;
  for (const HeightFunction& xi : initial) {
    if (xi.half_size() != n_half_)
      throw std::invalid_argument("mismatched half sizes");
    levels_.push_back(xi.data());
  }
  versions_.assign(levels_.size(), std::vector<uint64_t>(n2_, 0));
  for (uint32_t k = 0; k < levels_.size(); ++k)
    for (int i = 0; i < n2_; ++i) schedule(k, i);
}

int CornerFlipEngine::extremum_type(int traj, int site) const {
  const auto& h = levels_[traj];
  int64_t v = h[site], l = h[left(site)], r = h[right(site)];
  if (l < v && r < v) return -1;  // local maximum
  if (l > v && r > v) return +1;  // local minimum
  return 0;
}

void CornerFlipEngine::schedule(uint32_t traj, uint32_t site) {
  uint64_t version = ++versions_[traj][site];
  int type = extremum_type(traj, site);
  if (type == 0) return;
  ClockKey key{type > 0 ? uint8_t{1} : uint8_t{0},
               static_cast<int32_t>(site + 1), levels_[traj][site]};
  assert(key.valid_parity());  // corners sit at levels z = x (mod 2)
  double t = clocks_.first_ring_after(key, now_);
  queue_.push({t, traj, site, version});
}

void CornerFlipEngine::enable_order_monitor() {
  monitor_ = true;
  ordered_pairs_.clear();
  for (int i = 0; i < trajectories(); ++i)
    for (int j = 0; j < trajectories(); ++j) {
      if (i == j) continue;
      bool le = true;
      for (int s = 0; s < n2_ && le; ++s) le = levels_[i][s] <= levels_[j][s];
      if (le) ordered_pairs_.push_back({i, j});
    }
}

void CornerFlipEngine::enable_area_watch(int lower, int upper,
                                         bool stop_at_zero) {
  watch_ = true;
  watch_lower_ = lower;
  watch_upper_ = upper;
  stop_at_zero_ = stop_at_zero;
  area_ = pair_area(levels_[lower], levels_[upper]);
  if (area_ < 0) throw std::invalid_argument("watch pair is not ordered");
  if (area_ == 0) tau_ = 0.0;
}

void CornerFlipEngine::process(const Entry& e) {
  auto& h = levels_[e.traj];
  int site = e.site;
  int type = extremum_type(e.traj, site);  // pre-flip, +1 = min, -1 = max
  assert(type != 0);
  // reflection through the neighbors: the gradient is the (x,x+1) swap
  h[site] = h[left(site)] + h[right(site)] - h[site];
  ++events_;

  if (watch_) {
    if (static_cast<int>(e.traj) == watch_lower_)
      area_ -= type;  // lower flipping up shrinks the gap
    else if (static_cast<int>(e.traj) == watch_upper_)
      area_ += type;
  }
  if (monitor_) touched_sites_.push_back(site);
  schedule(e.traj, left(site));
  schedule(e.traj, site);
  schedule(e.traj, right(site));
}

void CornerFlipEngine::advance_to(double t) {
  while (!queue_.empty() && queue_.top().time <= t) {
    // Entries produced by a shared clock key carry bit-identical times and
    // form one coupled event; watches evaluate at batch boundaries only.
    double batch_time = queue_.top().time;
    touched_sites_.clear();
    while (!queue_.empty() && queue_.top().time == batch_time) {
      Entry e = queue_.top();
      queue_.pop();
      if (e.version != versions_[e.traj][e.site]) continue;  // stale
      now_ = batch_time;
      process(e);
    }
    if (monitor_) {
      for (int site : touched_sites_)
        for (const auto& [lo, hi] : ordered_pairs_)
          if (levels_[lo][site] > levels_[hi][site]) ++order_violations_;
    }
    if (watch_ && !tau_.has_value()) {
      assert(area_ >= 0);
      if (area_ == 0) tau_ = batch_time;
    }
    if (stop_at_zero_ && tau_.has_value()) break;
  }
  if (t > now_) now_ = t;
}

HeightFunction CornerFlipEngine::height_function(int traj) const {
  return HeightFunction(n_half_, levels_[traj]);
}

std::vector<ParticleConfiguration> simulate_exclusion(
    const ParticleConfiguration& chi, double t_end, Rng& rng,
    const std::vector<double>& sample_times) {
  if (t_end < 0) throw std::invalid_argument("negative time");
  int n2 = chi.size();
  std::vector<int8_t> s(n2);
  for (int x = 0; x < n2; ++x) s[x] = static_cast<int8_t>(chi.spin(x + 1));

  // active edge x connects sites x and x+1 (0-based, cyclic)
  std::vector<int> pos(n2, -1), active;
  auto edge_active = [&](int e) { return s[e] != s[(e + 1) % n2]; };
  auto add_edge = [&](int e) {
    if (pos[e] < 0) {
      pos[e] = static_cast<int>(active.size());
      active.push_back(e);
    }
  };
  auto remove_edge = [&](int e) {
    if (pos[e] >= 0) {
      int last = active.back();
      active[pos[e]] = last;
      pos[last] = pos[e];
      active.pop_back();
      pos[e] = -1;
    }
  };
  for (int e = 0; e < n2; ++e)
    if (edge_active(e)) add_edge(e);

  auto snapshot = [&] {
    std::vector<int> v(s.begin(), s.end());
    return ParticleConfiguration(chi.half_size(), v);
  };

  std::vector<ParticleConfiguration> out;
  std::size_t next_sample = 0;
  double t = 0.0;
  auto flush = [&](double horizon, bool inclusive) {
    while (next_sample < sample_times.size() &&
           (inclusive ? sample_times[next_sample] <= horizon
                      : sample_times[next_sample] < horizon)) {
      if (sample_times[next_sample] > t_end)
        throw std::invalid_argument("sample time beyond t_end");
      out.push_back(snapshot());
      ++next_sample;
    }
  };

  for (;;) {
    if (active.empty()) break;
    double dt = rng.exponential() / static_cast<double>(active.size());
    double t_next = t + dt;
    if (t_next > t_end) break;
    flush(t_next, /*inclusive=*/false);
    int e = active[rng.below(active.size())];
    int a = e, b = (e + 1) % n2;
    std::swap(s[a], s[b]);
    for (int d : {(e + n2 - 1) % n2, e, (e + 1) % n2}) {
      if (edge_active(d))
        add_edge(d);
      else
        remove_edge(d);
    }
    t = t_next;
  }
  flush(t_end, /*inclusive=*/true);
  return out;
}

std::vector<HeightFunction> simulate_corner_flip(
    const HeightFunction& xi, double t_end, ClockRealization& clocks,
    const std::vector<double>& sample_times) {
  CornerFlipEngine engine({xi}, clocks);
  std::vector<HeightFunction> out;
  for (double ts : sample_times) {
    if (ts > t_end) throw std::invalid_argument("sample time beyond t_end");
    engine.advance_to(ts);
    out.push_back(engine.height_function(0));
  }
  engine.advance_to(t_end);
  return out;
}

std::vector<HeightFunction> grand_coupling(
    const std::vector<HeightFunction>& initial, double t_end,
    ClockRealization& clocks, GrandCouplingReport* report) {
  CornerFlipEngine engine(initial, clocks);
  if (report) engine.enable_order_monitor();
  engine.advance_to(t_end);
  if (report) {
    report->order_violations = engine.order_violations();
    report->events = engine.events();
  }
  std::vector<HeightFunction> out;
  for (int k = 0; k < engine.trajectories(); ++k)
    out.push_back(engine.height_function(k));
  return out;
}

CoupledTriple build_coupled_triple(const ParticleConfiguration& chi,
                                   const TiltedMeasureSpec& spec,
                                   ClockRealization& clocks, Rng& rng) {
  spec.validate();
  if (chi.half_size() != spec.half_size)
    throw std::invalid_argument("mismatched half sizes");
  if (!in_fluctuation_set(chi, spec.alpha, spec.theta)) {
    // report the violating window for diagnosis
    double worst = max_partial_sum_deviation(chi, spec.alpha, spec.theta, 0.0);
    std::ostringstream msg;
    msg << "chi outside G(alpha,theta): window deviation " << worst
        << " exceeds sqrt(N) log log N = "
        << std::sqrt(static_cast<double>(chi.half_size())) *
               loglog_floor(chi.half_size());
    throw std::invalid_argument(msg.str());
  }

  TiltedDP dp(spec);
  ParticleConfiguration eta0 = dp.sample(rng);
  double h0 = max_partial_sum_deviation(eta0, spec.alpha, spec.theta, 0.0);
  double slack = std::sqrt(static_cast<double>(spec.half_size)) *
                 loglog_floor(spec.half_size);
  int64_t cal_h0 = 2 * static_cast<int64_t>(std::ceil((h0 + slack) / 2.0));

  HeightFunction xi0 = integrate(chi, 0);
  HeightFunction base = integrate(eta0, 0);
  std::vector<int64_t> lo = base.data(), hi = base.data();
  for (auto& v : lo) v -= cal_h0;
  for (auto& v : hi) v += cal_h0;
  HeightFunction xi1(spec.half_size, std::move(lo));
  HeightFunction xi2(spec.half_size, std::move(hi));
  for (int x = 1; x <= 2 * spec.half_size; ++x) {
    if (!(xi1.height(x) <= xi0.height(x) && xi0.height(x) <= xi2.height(x)))
      throw std::logic_error("sandwich ordering failed");
  }

  CoupledTriple triple{spec, h0, cal_h0, eta0,
                       CornerFlipEngine({xi1, xi0, xi2}, clocks)};
  triple.engine.enable_area_watch(0, 2, /*stop_at_zero=*/false);
  return triple;
}

int64_t pair_area(const std::vector<int64_t>& lower,
                  const std::vector<int64_t>& upper) {
  int64_t s = 0;
  for (std::size_t i = 0; i < lower.size(); ++i) s += upper[i] - lower[i];
  return s / 2;
}

int active_extrema_count(const std::vector<int64_t>& lower,
                         const std::vector<int64_t>& upper) {
  int n2 = static_cast<int>(lower.size());
  auto differ_near = [&](int x) {
    for (int d = -1; d <= 1; ++d) {
      int y = ((x + d) % n2 + n2) % n2;
      if (upper[y] > lower[y]) return true;
    }
    return false;
  };
  auto is_extremum = [&](const std::vector<int64_t>& h, int x) {
    int64_t l = h[(x + n2 - 1) % n2], r = h[(x + 1) % n2];
    return (l < h[x] && r < h[x]) || (l > h[x] && r > h[x]);
  };
  int count = 0;
  for (int x = 0; x < n2; ++x) {
    if (!differ_near(x)) continue;
    if (is_extremum(lower, x)) ++count;
    if (is_extremum(upper, x)) ++count;
  }
  return count;
}

double h_functional(const HeightFunction& xi, double alpha, double theta,
                    double t) {
  return max_partial_sum_deviation(gradient(xi), alpha, theta, t);
}

namespace {

int e_min_window(int half_size) {
  return static_cast<int>(
      std::ceil(std::pow(static_cast<double>(half_size), 0.25)));
}

}  // namespace

bool e_membership(const ParticleConfiguration& eta) {
  int n2 = eta.size();
  std::vector<int> d(2 * n2 + 1, 0);  // prefix of the doubled indicator
  for (int z = 1; z <= 2 * n2; ++z)
    d[z] = d[z - 1] + (eta.spin(z) != eta.spin(z + 1) ? 1 : 0);
  int min_len = e_min_window(eta.half_size());
  for (int len = min_len; len <= n2; ++len) {
    for (int x = 1; x <= n2; ++x) {
      int j = d[x + len - 1] - d[x - 1];
      if (4 * j < len) return false;
    }
  }
  return true;
}

bool e_membership_bruteforce(const ParticleConfiguration& eta) {
  int n2 = eta.size();
  int min_len = e_min_window(eta.half_size());
  for (int x = 1; x <= n2; ++x)
    for (int len = min_len; len <= n2; ++len) {
      int j = 0;
      for (int z = x; z < x + len; ++z)
        if (eta.spin(z) != eta.spin(z + 1)) ++j;
      if (4 * j < len) return false;
    }
  return true;
}

ObservableSample sample_observables(const CoupledTriple& triple) {
  ObservableSample s;
  const CornerFlipEngine& e = triple.engine;
  s.t = e.now();
  s.area = pair_area(e.levels(0), e.levels(2));
  s.active_extrema = active_extrema_count(e.levels(0), e.levels(2));
  s.h_lower = h_functional(e.height_function(0), triple.spec.alpha,
                           triple.spec.theta, e.now());
  s.h_upper = h_functional(e.height_function(2), triple.spec.alpha,
                           triple.spec.theta, e.now());
  s.lower_in_e = e_membership(gradient(e.height_function(0)));
  return s;
}

double default_coalescence_horizon(int half_size) {
  return 4.0 * coalescence_checkpoint(half_size);
}

double coalescence_checkpoint(int half_size) {
  double n2 = static_cast<double>(half_size) * half_size;
  return n2 * std::sqrt(std::log(static_cast<double>(half_size)));
}

std::vector<CoalescenceResult> coalescence_experiment(
    int half_size, double alpha, double theta, int n_runs, double t_max,
    uint64_t seed, unsigned threads) {
  if (n_runs < 1) throw std::invalid_argument("need at least one run");
  if (t_max <= 0) t_max = default_coalescence_horizon(half_size);
  TiltedMeasureSpec spec{half_size, alpha, theta};
  spec.validate();

  std::vector<CoalescenceResult> results(n_runs);
  TiltedDP dp(spec);  // shared, immutable
  parallel_for(n_runs, threads, [&](std::size_t r) {
    uint64_t replica_seed = derive_seed(seed, r);
    Rng rng(replica_seed);
    // chi from the stationary-tilted ensemble, conditioned on G
    ParticleConfiguration chi = dp.sample(rng);
    for (int tries = 0; !in_fluctuation_set(chi, alpha, theta) && tries < 64;
         ++tries)
      chi = dp.sample(rng);
    ClockRealization clocks(derive_seed(replica_seed, 0x10c5));

    ParticleConfiguration eta0 = dp.sample(rng);
    double h0 = max_partial_sum_deviation(eta0, alpha, theta, 0.0);
    double slack =
        std::sqrt(static_cast<double>(half_size)) * loglog_floor(half_size);
    int64_t cal_h0 = 2 * static_cast<int64_t>(std::ceil((h0 + slack) / 2.0));
    HeightFunction xi0 = integrate(chi, 0);
    HeightFunction base = integrate(eta0, 0);
    std::vector<int64_t> lo = base.data(), hi = base.data();
    for (auto& v : lo) v -= cal_h0;
    for (auto& v : hi) v += cal_h0;
    CornerFlipEngine engine({HeightFunction(half_size, std::move(lo)), xi0,
                             HeightFunction(half_size, std::move(hi))},
                            clocks);
    engine.enable_area_watch(0, 2, /*stop_at_zero=*/true);
    int64_t a0 = engine.area();
    engine.advance_to(t_max);

    CoalescenceResult& out = results[r];
    out.h0_functional = h0;
    out.cal_h0 = cal_h0;
    out.initial_area = a0;
    out.events = engine.events();
    if (engine.coalescence_time().has_value()) {
      out.tau = *engine.coalescence_time();
      out.censored = false;
    } else {
      out.tau = t_max;
      out.censored = true;
    }
  });
  return results;
}

double fraction_uncoalesced(const std::vector<CoalescenceResult>& results,
                            double t) {
  if (results.empty()) return 0.0;
  std::size_t uncoalesced = 0;
  for (const CoalescenceResult& r : results)
    if (r.censored || r.tau > t) ++uncoalesced;
  return static_cast<double>(uncoalesced) / results.size();
}

StabilityReport tilted_stability_check(int half_size, double alpha, double t,
                                       int n, uint64_t seed,
                                       unsigned threads) {
  TiltedMeasureSpec spec{half_size, alpha, 0.0};
  spec.validate();
  TiltedDP dp(spec);
  const int kSamples = 8;
  std::vector<double> grid;
  for (int j = 1; j <= kSamples; ++j) grid.push_back(t * j / kSamples);

  StabilityReport report;
  report.final_deviation.assign(n, 0.0);
  std::vector<uint64_t> exits(n, 0);
  parallel_for(n, threads, [&](std::size_t r) {
    Rng rng(derive_seed(seed, r));
    ParticleConfiguration eta0 = dp.sample(rng);
    if (t == 0.0) {
      report.final_deviation[r] =
          max_partial_sum_deviation(eta0, alpha, 0.0, 0.0);
      exits[r] = e_membership(eta0) ? 0 : 1;
      return;
    }
    auto trace = simulate_exclusion(eta0, t, rng, grid);
    for (std::size_t j = 0; j < trace.size(); ++j)
      if (!e_membership(trace[j])) ++exits[r];
    report.final_deviation[r] =
        max_partial_sum_deviation(trace.back(), alpha, 0.0, t);
  });
  for (uint64_t e : exits) report.e_exits += e;
  report.e_checks = static_cast<uint64_t>(n) * (t == 0.0 ? 1 : kSamples);

  std::vector<double> sorted = report.final_deviation;
  std::sort(sorted.begin(), sorted.end());
  report.median_deviation = sorted[sorted.size() / 2];

  // tail fit: empirical P(dev >= s sqrt(N)) ~ 2 exp(-c s^2)
  double root_n = std::sqrt(static_cast<double>(half_size));
  double sxx = 0.0, sxy = 0.0;
  for (int j = 1; j <= 12; ++j) {
    double s = 0.25 * j;
    double freq = 0.0;
    for (double d : report.final_deviation)
      if (d >= s * root_n) freq += 1.0;
    freq /= n;
    if (freq <= 0.0 || freq >= 1.0) continue;
    double x = s * s, y = std::log(freq / 2.0);
    sxx += x * x;
    sxy += x * y;
  }
  report.fitted_c = sxx > 0.0 ? -sxy / sxx : 0.0;
  return report;
}

}  // namespace sep
