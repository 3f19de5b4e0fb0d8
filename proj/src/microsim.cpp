#include "hydrolim/microsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hydrolim {

// ============================================================================
// ScalingScheme
// ============================================================================

ScalingScheme ScalingScheme::with_defaults(int N, double p, double sigma_exponent,
                                           double K_exponent, BoundaryRates bd) {
  if (N < 1) throw std::invalid_argument("scaling: N must be >= 1");
  if (!(p >= 0.5 && p <= 1.0))
    throw std::invalid_argument("scaling: p must lie in [1/2, 1]");
  ScalingScheme s;
  s.N = N;
  s.p = p;
  s.sigma = std::round(std::pow(static_cast<double>(N), sigma_exponent));
  s.K = std::max(2, static_cast<int>(std::round(std::pow(static_cast<double>(N), K_exponent))));
  s.bd = bd;
  return s;
}

void ScalingScheme::validate_window() const {
  const double n = N;
  if (!(sigma / n < 1.0))
    throw std::invalid_argument("scaling window: requires sigma < N");
  if (!(sigma * sigma / n >= 1.0))
    throw std::invalid_argument("scaling window: requires sigma^2 >= N");
  const double k_lo = std::pow(n, 5.0 / 9.0);
  if (!(K + 1e-9 >= k_lo && K <= sigma + 1e-9))
    throw std::invalid_argument("scaling window: requires N^{5/9} <= K <= sigma");
}

// ============================================================================
// RateTree
// ============================================================================

RateTree::RateTree(int n) : n_(n), leaf_(n, 0.0), tree_(n + 1, 0.0) {
  highbit_ = 1;
  while (highbit_ * 2 <= n_) highbit_ *= 2;
}

void RateTree::set(int i, double rate) {
  const double delta = rate - leaf_[i];
  if (delta == 0) return;
  leaf_[i] = rate;
  for (int pos = i + 1; pos <= n_; pos += pos & (-pos)) tree_[pos] += delta;
  total_ += delta;
}

int RateTree::sample(double u) const {
  double target = u * total_;
  int pos = 0;
  for (int step = highbit_; step > 0; step >>= 1) {
    const int next = pos + step;
    if (next <= n_ && tree_[next] < target) {
      target -= tree_[next];
      pos = next;
    }
  }
  if (pos >= n_) pos = n_ - 1;
  // Accumulated floating-point drift could in principle land the descent on a
  // disabled channel; walk back to the nearest enabled one.
  while (pos > 0 && leaf_[pos] == 0.0) --pos;
  return pos;
}

void RateTree::rebuild() {
  std::fill(tree_.begin(), tree_.end(), 0.0);
  total_ = 0;
  for (int i = 0; i < n_; ++i) {
    const double r = leaf_[i];
    for (int pos = i + 1; pos <= n_; pos += pos & (-pos)) tree_[pos] += r;
  }
  total_ = direct_sum();
}

double RateTree::direct_sum() const {
  double s = 0, c = 0;
  for (double r : leaf_) {
    const double y = r - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

// ============================================================================
// Channel pricing
// ============================================================================

double bond_rate(const Configuration& c, int i, const ScalingScheme& s) {
  if (c.occ[i] == c.occ[i + 1]) return 0.0;
  const double exch = c.occ[i] ? s.p : 1.0 - s.p;
  return s.N * (exch + 0.5 * s.sigma);
}

double site_rate(const Configuration& c, int i, const ScalingScheme& s,
                 const LatticeProfile& lat) {
  const int N = s.N;
  if (i == 0) return N * (c.occ[0] ? s.bd.out_l : s.bd.in_l);
  if (i == N) return N * (c.occ[N] ? s.bd.out_r : s.bd.in_r);
  return lat.V[i] * (c.occ[i] ? 1.0 - lat.rho[i] : lat.rho[i]);
}

// ============================================================================
// SimState
// ============================================================================

SimState::SimState(Configuration init, const ScalingScheme& scheme,
                   const LatticeProfile& lattice, std::uint64_t seed)
    : scheme_(scheme),
      lat_(&lattice),
      config_(std::move(init)),
      rates_(2 * scheme.N + 1),
      rng_(seed) {
  const int N = scheme_.N;
  if (config_.N() != N || lattice.N != N)
    throw std::invalid_argument("sim state: configuration/lattice/scheme sizes disagree");
  swap_rate_10_ = N * (scheme_.p + 0.5 * scheme_.sigma);
  swap_rate_01_ = N * (1.0 - scheme_.p + 0.5 * scheme_.sigma);
  flip_up_ = lattice.V * lattice.rho;          // creation at an empty site
  flip_down_ = lattice.V * (1.0 - lattice.rho);  // annihilation at a full site
  int mass = 0;
  for (auto b : config_.occ) mass += b;
  config_.mass = mass;
  for (int i = 0; i < N; ++i) reprice_bond(i);
  for (int i = 0; i <= N; ++i) reprice_site(i);
}

void SimState::reprice_bond(int i) {
  const auto& occ = config_.occ;
  double r = 0;
  if (occ[i] != occ[i + 1]) r = occ[i] ? swap_rate_10_ : swap_rate_01_;
  rates_.set(i, r);
}

void SimState::reprice_site(int i) {
  const int N = scheme_.N;
  double r;
  if (i == 0)
    r = N * (config_.occ[0] ? scheme_.bd.out_l : scheme_.bd.in_l);
  else if (i == N)
    r = N * (config_.occ[N] ? scheme_.bd.out_r : scheme_.bd.in_r);
  else
    r = config_.occ[i] ? flip_down_[i] : flip_up_[i];
  rates_.set(N + i, r);
}

void SimState::apply(int channel) {
  const int N = scheme_.N;
  auto& occ = config_.occ;
  if (channel < N) {
    std::swap(occ[channel], occ[channel + 1]);
    ++counters_.swaps;
    if (channel > 0) reprice_bond(channel - 1);
    reprice_bond(channel);
    if (channel + 1 < N) reprice_bond(channel + 1);
    reprice_site(channel);
    reprice_site(channel + 1);
  } else {
    const int i = channel - N;
    occ[i] ^= 1;
    if (occ[i]) {
      ++config_.mass;
      (i == 0 || i == N) ? ++counters_.bd_creates : ++counters_.creates;
    } else {
      --config_.mass;
      (i == 0 || i == N) ? ++counters_.bd_destroys : ++counters_.destroys;
    }
    if (i > 0) reprice_bond(i - 1);
    if (i < N) reprice_bond(i);
    reprice_site(i);
  }
  ++events_;
}

double SimState::draw_waiting_time() {
  return rng_.exponential(rates_.total());
}

void SimState::select_and_apply() {
  apply(rates_.sample(rng_.uniform_pos()));
}

SimState::Event SimState::step() {
  if (!(rates_.total() > 0)) throw std::runtime_error("step: no enabled channels");
  const double dt = draw_waiting_time();
  const int ch = rates_.sample(rng_.uniform_pos());
  apply(ch);
  time_ += dt;
  return {dt, ch};
}

void SimState::audit() const {
  int mass = 0;
  for (auto b : config_.occ) mass += b;
  if (mass != config_.mass)
    throw std::runtime_error("audit: mass cache desynced from popcount");
  const int N = scheme_.N;
  for (int i = 0; i < N; ++i)
    if (rates_.get(i) != bond_rate(config_, i, scheme_))
      throw std::runtime_error("audit: stale bond rate in tree");
  for (int i = 0; i <= N; ++i)
    if (rates_.get(N + i) != site_rate(config_, i, scheme_, *lat_))
      throw std::runtime_error("audit: stale site rate in tree");
  const double direct = rates_.direct_sum();
  const double cached = rates_.total();
  if (std::abs(direct - cached) > 1e-9 * std::max(1.0, std::abs(direct)))
    throw std::runtime_error("audit: rate tree total desynced");
}

// ============================================================================
// Initial data and trajectories
// ============================================================================

Configuration sample_initial(const std::function<double(double)>& u0, int N,
                             Rng& rng) {
  Configuration c = Configuration::zeros(N);
  for (int i = 0; i <= N; ++i) {
    const double u = u0(static_cast<double>(i) / N);
    if (!(u >= 0.0 && u <= 1.0))
      throw std::invalid_argument("sample_initial: u0 value outside [0,1]");
    c.occ[i] = rng.bernoulli(u) ? 1 : 0;
    c.mass += c.occ[i];
  }
  return c;
}

Trajectory simulate(Configuration init, const ScalingScheme& scheme,
                    const LatticeProfile& lattice,
                    const std::vector<double>& obs_times, std::uint64_t seed,
                    std::uint64_t audit_interval) {
  for (std::size_t k = 0; k < obs_times.size(); ++k) {
    if (obs_times[k] < 0 || (k > 0 && obs_times[k] < obs_times[k - 1]))
      throw std::invalid_argument("simulate: observation times must be nondecreasing and >= 0");
  }
  SimState st(std::move(init), scheme, lattice, seed);
  Trajectory traj;
  traj.scheme = scheme;
  traj.times = obs_times;
  traj.snapshots.reserve(obs_times.size());

  std::size_t obs = 0;
  const std::size_t n_obs = obs_times.size();
  while (obs < n_obs) {
    const double dt = st.draw_waiting_time();  // +inf when nothing is enabled
    const double t_next = st.time() + dt;
    while (obs < n_obs && obs_times[obs] < t_next) {
      traj.snapshots.push_back(st.config());
      ++obs;
    }
    if (obs >= n_obs) break;
    st.select_and_apply();
    st.advance_clock(dt);
    if (audit_interval > 0 && st.events() % audit_interval == 0) st.audit();
  }
  traj.counters = st.counters();
  return traj;
}

}  // namespace hydrolim
