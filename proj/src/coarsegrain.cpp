#include "hydrolim/coarsegrain.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace hydrolim {

double block_average(const Configuration& c, int i, int K) {
  const int N = c.N();
  if (K < 1) throw std::invalid_argument("block_average: K must be >= 1");
  if (i < K || i > N - K)
    throw std::invalid_argument("block_average: site outside the valid band [K, N-K]");
  std::int64_t acc = 0;
  for (int j = -(K - 1); j <= K - 1; ++j)
    acc += static_cast<std::int64_t>(K - std::abs(j)) * c.occ[i - j];
  return static_cast<double>(acc) / (static_cast<double>(K) * K);
}

double empirical_pairing(const Configuration& c,
                         const std::function<double(double)>& psi) {
  const int N = c.N();
  double s = 0;
  for (int i = 0; i <= N; ++i)
    if (c.occ[i]) s += psi(static_cast<double>(i) / N);
  return s / N;
}

Eigen::ArrayXd triangular_average(const std::uint8_t* a, int len, int K) {
  if (K < 1 || len - 2 * K + 1 <= 0)
    throw std::invalid_argument("triangular_average: sequence too short for this K");
  // box(m) = sum of a over [m, m+K-1]; the triangular sum at center i equals
  // sum_{s=i-K+1..i} box(s), another box sum, so two prefix passes suffice.
  std::vector<std::int64_t> pref(len + 1, 0);
  for (int i = 0; i < len; ++i) pref[i + 1] = pref[i] + a[i];
  const int n_box = len - K + 1;  // box starts 0..len-K
  std::vector<std::int64_t> bpref(n_box + 1, 0);
  for (int m = 0; m < n_box; ++m) bpref[m + 1] = bpref[m] + (pref[m + K] - pref[m]);

  const int lo = K - 1, hi = len - K;
  Eigen::ArrayXd out(hi - lo + 1);
  const double k2 = static_cast<double>(K) * K;
  for (int i = lo; i <= hi; ++i) {
    const int m = i - K + 1;
    out[i - lo] = static_cast<double>(bpref[m + K] - bpref[m]) / k2;
  }
  return out;
}

Eigen::ArrayXd block_average_row(const Configuration& c, int K) {
  const int N = c.N();
  if (N - 2 * K < 0)
    throw std::invalid_argument("block_average_row: band is empty for this K");
  // centers K-1..N-K+1 come back; keep the band K..N-K
  Eigen::ArrayXd all = triangular_average(c.occ.data(), N + 1, K);
  return all.segment(1, N - 2 * K + 1);
}

EmpiricalField empirical_density_field(const Trajectory& traj, int K) {
  if (traj.snapshots.empty()) throw std::invalid_argument("empirical field: empty trajectory");
  const int N = traj.snapshots.front().N();
  EmpiricalField f;
  f.N = N;
  f.K = K;
  f.times = traj.times;
  f.values.resize(static_cast<Eigen::Index>(traj.snapshots.size()), N - 2 * K + 1);
  for (std::size_t r = 0; r < traj.snapshots.size(); ++r)
    f.values.row(static_cast<Eigen::Index>(r)) = block_average_row(traj.snapshots[r], K).transpose();
  return f;
}

BoundaryAverage boundary_block_time_average(const Trajectory& traj, double y,
                                            double t, Edge edge, double inf_V) {
  if (!(y > 0 && y < 0.5))
    throw std::invalid_argument("boundary block: y must lie in (0, 1/2)");
  if (traj.snapshots.size() < 2)
    throw std::invalid_argument("boundary block: need at least two snapshots");
  const int N = traj.snapshots.front().N();
  const int span = static_cast<int>(std::floor(y * N));  // sites 0..span
  const double count = span + 1;

  auto density = [&](const Configuration& c) {
    std::int64_t s = 0;
    if (edge == Edge::Left)
      for (int i = 0; i <= span; ++i) s += c.occ[i];
    else
      for (int i = N - span; i <= N; ++i) s += c.occ[i];
    return static_cast<double>(s) / count;
  };

  BoundaryAverage out;
  const auto& times = traj.times;
  double integral = 0;
  double max_gap = 0;
  double prev_t = times[0];
  double prev_g = density(traj.snapshots[0]);
  if (times[0] > 0) out.density_ok = false;  // integral must start at 0
  for (std::size_t k = 1; k < times.size() && prev_t < t; ++k) {
    double tk = times[k];
    double gk = density(traj.snapshots[k]);
    if (tk > t) {
      // linear interpolation of the block density onto the horizon
      const double w = (t - prev_t) / (tk - prev_t);
      gk = prev_g + w * (gk - prev_g);
      tk = t;
    }
    integral += 0.5 * (prev_g + gk) * (tk - prev_t);
    max_gap = std::max(max_gap, tk - prev_t);
    prev_t = tk;
    prev_g = gk;
  }
  if (prev_t < t) {
    integral += prev_g * (t - prev_t);  // hold the last snapshot
    out.density_ok = false;
  }
  out.value = integral;
  out.max_spacing = max_gap;
  if (inf_V > 0 && max_gap > 0.25 * y / inf_V) out.density_ok = false;
  return out;
}

}  // namespace hydrolim
