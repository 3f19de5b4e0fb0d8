#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "hydrolim/profiles.hpp"
#include "hydrolim/rng.hpp"

namespace hydrolim {

// Occupation vector on sites 0..N with a cached particle count.
struct Configuration {
  std::vector<std::uint8_t> occ;
  int mass = 0;

  int N() const { return static_cast<int>(occ.size()) - 1; }
  static Configuration zeros(int N) { return {std::vector<std::uint8_t>(N + 1, 0), 0}; }
  static Configuration ones(int N) { return {std::vector<std::uint8_t>(N + 1, 1), N + 1}; }
  bool operator==(const Configuration&) const = default;
};

struct BoundaryRates {
  double in_l = 0.5, out_l = 0.5, in_r = 0.5, out_r = 0.5;
};

// Simulation scales: lattice size, asymmetry, extra symmetric exchange
// strength sigma, mesoscopic block half-width K, and reservoir rates.
// Defaults sigma = round(N^{2/3}), K = round(N^{0.61}) sit inside the
// asymptotic windows the limit statements require; validate_window() checks
// the finite-N proxies sigma/N < 1, sigma^2/N >= 1 and N^{5/9} <= K <= sigma.
struct ScalingScheme {
  int N = 0;
  double p = 1.0;
  double sigma = 0;
  int K = 2;
  BoundaryRates bd;

  static ScalingScheme with_defaults(int N, double p,
                                     double sigma_exponent = 2.0 / 3.0,
                                     double K_exponent = 0.61,
                                     BoundaryRates bd = {});
  void validate_window() const;  // throws std::invalid_argument on violation
};

// Fenwick tree over per-channel event rates: point update and
// rate-proportional sampling in O(log n).
class RateTree {
 public:
  explicit RateTree(int n);
  int size() const { return n_; }
  void set(int i, double rate);
  double get(int i) const { return leaf_[i]; }
  double total() const { return total_; }
  int sample(double u) const;  // u in (0,1]
  void rebuild();
  double direct_sum() const;  // Kahan sum of leaves, for audits

 private:
  int n_;
  int highbit_;
  std::vector<double> leaf_;
  std::vector<double> tree_;  // 1-indexed partial sums
  double total_ = 0;
};

struct EventCounters {
  std::uint64_t swaps = 0;
  std::uint64_t creates = 0, destroys = 0;        // interior relaxation flips
  std::uint64_t bd_creates = 0, bd_destroys = 0;  // reservoir flips at 0 and N
  std::uint64_t total() const { return swaps + creates + destroys + bd_creates + bd_destroys; }
};

// Channel layout: [0, N) are the bonds (swap of sites i, i+1), [N, 2N] are the
// site flips. All rates carry the hyperbolic factor N; interior flip rates
// are V_i[rho_i(1-eta_i) + (1-rho_i)eta_i] after the 1/N of the relaxation
// generator cancels against it.
double bond_rate(const Configuration& c, int i, const ScalingScheme& s);
double site_rate(const Configuration& c, int i, const ScalingScheme& s,
                 const LatticeProfile& lat);

class SimState {
 public:
  SimState(Configuration init, const ScalingScheme& scheme,
           const LatticeProfile& lattice, std::uint64_t seed);

  struct Event {
    double dt;
    int channel;  // < N: bond swap; >= N: flip of site channel-N
  };

  // One exact jump: exponential waiting time at the total rate, channel
  // selected proportionally to its rate. Throws if no channel is enabled.
  Event step();

  const Configuration& config() const { return config_; }
  double time() const { return time_; }
  double total_rate() const { return rates_.total(); }
  double channel_rate(int ch) const { return rates_.get(ch); }
  int bond_channel(int i) const { return i; }
  int site_channel(int i) const { return scheme_.N + i; }
  const EventCounters& counters() const { return counters_; }
  std::uint64_t events() const { return events_; }

  // Verifies mass cache against popcount and the tree total against a direct
  // sum; throws std::runtime_error on desync.
  void audit() const;

  // Lower-level pieces used by simulate(), which must observe the state
  // between the waiting-time draw and the jump.
  double draw_waiting_time();
  void select_and_apply();
  void advance_clock(double dt) { time_ += dt; }

 private:
  void reprice_bond(int i);
  void reprice_site(int i);
  void apply(int channel);

  ScalingScheme scheme_;
  const LatticeProfile* lat_;
  Configuration config_;
  double time_ = 0;
  RateTree rates_;
  Rng rng_;
  EventCounters counters_;
  std::uint64_t events_ = 0;
  // precomputed channel constants
  double swap_rate_10_, swap_rate_01_;
  Eigen::ArrayXd flip_up_, flip_down_;
};

// Independent Bernoulli(u0(i/N)) occupations; rejects u0 values outside [0,1].
Configuration sample_initial(const std::function<double(double)>& u0, int N, Rng& rng);

struct Trajectory {
  ScalingScheme scheme;
  std::vector<double> times;
  std::vector<Configuration> snapshots;
  EventCounters counters;
};

// Exact jump-chain realization observed at the given (nondecreasing) times.
// Snapshots follow the right-continuous convention: an observation falling on
// a jump instant records the post-jump state. A zero total rate freezes the
// configuration rather than failing. audit_interval > 0 re-validates the rate
// tree every that many events.
Trajectory simulate(Configuration init, const ScalingScheme& scheme,
                    const LatticeProfile& lattice,
                    const std::vector<double>& obs_times, std::uint64_t seed,
                    std::uint64_t audit_interval = 0);

}  // namespace hydrolim
