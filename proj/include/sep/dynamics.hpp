#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

#include "sep/clocks.hpp"
#include "sep/lattice.hpp"
#include "sep/tilted.hpp"

namespace sep {

// Event-driven corner-flip dynamics for any number of height-function
// trajectories sharing one clock realization. A down ring at (x, xi(x))
// flips a local maximum, an up ring a local minimum; trajectories at the
// same (direction, site, level) key fire together, which is what makes the
// coupling order-preserving.
class CornerFlipEngine {
 public:
  CornerFlipEngine(std::vector<HeightFunction> initial,
                   ClockRealization& clocks);

  int trajectories() const { return static_cast<int>(levels_.size()); }
  int half_size() const { return n_half_; }
  double now() const { return now_; }
  uint64_t events() const { return events_; }

  // Verify pathwise order preservation for every initially ordered pair,
  // at the flipped site of every event.
  void enable_order_monitor();
  uint64_t order_violations() const { return order_violations_; }

  // Track A(t) = (1/2) sum_x (xi_upper - xi_lower) and its hitting time of
  // zero; the engine can stop early at coalescence.
  void enable_area_watch(int lower, int upper, bool stop_at_zero);
  int64_t area() const { return area_; }
  std::optional<double> coalescence_time() const { return tau_; }

  // Process all events with time <= t; afterwards now() == max(now, t).
  void advance_to(double t);

  HeightFunction height_function(int traj) const;
  const std::vector<int64_t>& levels(int traj) const { return levels_[traj]; }

 private:
  struct Entry {
    double time;
    uint32_t traj;
    uint32_t site;  // 0-based
    uint64_t version;
    bool operator>(const Entry& o) const {
      if (time != o.time) return time > o.time;
      if (traj != o.traj) return traj > o.traj;
      return site > o.site;
    }
  };

  int left(int i) const { return i == 0 ? n2_ - 1 : i - 1; }
  int right(int i) const { return i == n2_ - 1 ? 0 : i + 1; }
  // +1 for local minimum, -1 for local maximum, 0 otherwise
  int extremum_type(int traj, int site) const;
  void schedule(uint32_t traj, uint32_t site);
  void process(const Entry& e);

  int n_half_, n2_;
  ClockRealization& clocks_;
  std::vector<std::vector<int64_t>> levels_;
  std::vector<std::vector<uint64_t>> versions_;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue_;
  double now_ = 0.0;
  uint64_t events_ = 0;

  bool monitor_ = false;
  std::vector<std::pair<int, int>> ordered_pairs_;
  std::vector<int> touched_sites_;
  uint64_t order_violations_ = 0;

  bool watch_ = false;
  int watch_lower_ = -1, watch_upper_ = -1;
  bool stop_at_zero_ = false;
  int64_t area_ = 0;
  std::optional<double> tau_;
};

// Exclusion process trace: states at the requested (sorted) sample times,
// each <= t_end. Event-driven over the active-edge set.
std::vector<ParticleConfiguration> simulate_exclusion(
    const ParticleConfiguration& chi, double t_end, Rng& rng,
    const std::vector<double>& sample_times);

// Corner-flip trace against a clock realization.
std::vector<HeightFunction> simulate_corner_flip(
    const HeightFunction& xi, double t_end, ClockRealization& clocks,
    const std::vector<double>& sample_times);

struct GrandCouplingReport {
  uint64_t order_violations = 0;
  uint64_t events = 0;
};

// All trajectories evolved against the same clocks; returns final states.
std::vector<HeightFunction> grand_coupling(
    const std::vector<HeightFunction>& initial, double t_end,
    ClockRealization& clocks, GrandCouplingReport* report = nullptr);

// xi1 <= xi0 <= xi2 with shared clocks (engine trajectory order:
// 0 = xi1, 1 = xi0, 2 = xi2).
struct CoupledTriple {
  TiltedMeasureSpec spec;
  double h0_functional = 0.0;  // H_{0,alpha}(eta_0)
  int64_t cal_h0 = 0;          // even sandwich offset
  ParticleConfiguration eta0;
  CornerFlipEngine engine;
};

// Draws eta_0 ~ nu^{N,alpha,theta}, sandwiches integrate(chi,0) between
// integrate(eta_0,0) -+ calH0 with calH0 = 2*ceil((H_0 + sqrt(N) llN)/2).
// Throws (reporting the violating window) if chi is outside G_{alpha,theta}.
CoupledTriple build_coupled_triple(const ParticleConfiguration& chi,
                                   const TiltedMeasureSpec& spec,
                                   ClockRealization& clocks, Rng& rng);

// Coupling observables, computed by direct definition.
int64_t pair_area(const std::vector<int64_t>& lower,
                  const std::vector<int64_t>& upper);
int active_extrema_count(const std::vector<int64_t>& lower,
                         const std::vector<int64_t>& upper);
double h_functional(const HeightFunction& xi, double alpha, double theta,
                    double t);

// Membership in the active-edge-density set E (windows of length >=
// N^{1/4} carry at least a quarter density of sign changes).
bool e_membership(const ParticleConfiguration& eta);
bool e_membership_bruteforce(const ParticleConfiguration& eta);

struct ObservableSample {
  double t = 0.0;
  int64_t area = 0;
  int active_extrema = 0;
  double h_lower = 0.0, h_upper = 0.0;
  bool lower_in_e = false;
};

ObservableSample sample_observables(const CoupledTriple& triple);

struct CoalescenceResult {
  double tau = 0.0;  // censoring time if censored
  bool censored = false;
  double h0_functional = 0.0;
  int64_t cal_h0 = 0;
  int64_t initial_area = 0;
  uint64_t events = 0;
};

// Coalescence experiment: independent replicas of the coupled triple,
// each run to coalescence or t_max (default 4 N^2 sqrt(log N)). The initial
// chi of each replica is drawn from nu^{N,alpha,theta} and redrawn until it
// lies in G.
std::vector<CoalescenceResult> coalescence_experiment(
    int half_size, double alpha, double theta, int n_runs, double t_max,
    uint64_t seed, unsigned threads = 1);

double default_coalescence_horizon(int half_size);  // 4 N^2 sqrt(log N)
double coalescence_checkpoint(int half_size);       // N^2 sqrt(log N)
double fraction_uncoalesced(const std::vector<CoalescenceResult>& results,
                            double t);

struct StabilityReport {
  std::vector<double> final_deviation;  // H_{t,alpha}(eta_t) per replica
  uint64_t e_exits = 0;                 // exits observed at sampled times
  uint64_t e_checks = 0;
  double fitted_c = 0.0;   // tail fit freq ~ 2 exp(-c s^2), s in sqrt(N) units
  double median_deviation = 0.0;
};

// Tilt-stability probe: replicas from nu^{N,alpha,0} evolved to time
// t, window deviations and E-membership recorded on a sample-time grid.
StabilityReport tilted_stability_check(int half_size, double alpha, double t,
                                       int n, uint64_t seed,
                                       unsigned threads = 1);

}  // namespace sep
