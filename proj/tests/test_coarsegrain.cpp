#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "hydrolim/coarsegrain.hpp"
#include "hydrolim/microsim.hpp"

using namespace hydrolim;

namespace {

Configuration random_config(int N, double dens, std::uint64_t seed) {
  Rng rng(seed);
  return sample_initial([dens](double) { return dens; }, N, rng);
}

}  // namespace

TEST_CASE("triangular weights sum to one exactly") {
  // integer identity K + 2 sum_{j=1}^{K-1} (K-j) = K^2
  for (int K = 1; K <= 200; ++K) {
    std::int64_t acc = K;
    for (int j = 1; j < K; ++j) acc += 2 * (K - j);
    CHECK(acc == static_cast<std::int64_t>(K) * K);
  }
  // consequently the all-ones block average is exactly 1 in floating point
  auto ones = Configuration::ones(4000);
  for (int K : {2, 7, 64, 501}) {
    CHECK(block_average(ones, 2000, K) == 1.0);
  }
}

TEST_CASE("block average basics") {
  const int N = 10;
  auto zeros = Configuration::zeros(N);
  CHECK(block_average(zeros, 5, 3) == 0.0);

  // K=2 with the pattern 1,0,1 centered at i: w_{+-1} = 1/4 each
  Configuration c = Configuration::zeros(N);
  c.occ[4] = 1;
  c.occ[6] = 1;
  c.mass = 2;
  CHECK(block_average(c, 5, 2) == doctest::Approx(0.5));

  CHECK_THROWS(block_average(c, 1, 3));      // below the band
  CHECK_THROWS(block_average(c, N, 3));      // above the band
  CHECK_NOTHROW(block_average(c, 3, 3));
  CHECK_NOTHROW(block_average(c, N - 3, 3));
}

TEST_CASE("sliding-window row equals the naive double loop") {
  const int N = 200, K = 16;
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    auto c = random_config(N, 0.37, seed);
    auto row = block_average_row(c, K);
    REQUIRE(row.size() == N - 2 * K + 1);
    for (int i = K; i <= N - K; ++i) {
      CHECK(row[i - K] == doctest::Approx(block_average(c, i, K)).epsilon(1e-15));
    }
  }
}

TEST_CASE("empirical pairing") {
  const int N = 50;
  auto ones = Configuration::ones(N);
  CHECK(empirical_pairing(ones, [](double) { return 1.0; }) ==
        doctest::Approx(static_cast<double>(N + 1) / N));
  auto zeros = Configuration::zeros(N);
  CHECK(empirical_pairing(zeros, [](double) { return 1.0; }) == 0.0);

  Configuration single = Configuration::zeros(N);
  single.occ[N] = 1;
  single.mass = 1;
  CHECK(empirical_pairing(single, [](double x) { return x; }) ==
        doctest::Approx(1.0 / N));
}

TEST_CASE("empirical density field") {
  const int N = 64, K = 8;
  Trajectory traj;
  traj.times = {0.0, 1.0, 2.0};
  auto c = random_config(N, 0.5, 9);
  traj.snapshots = {c, c, c};

  auto f = empirical_density_field(traj, K);
  CHECK(f.cells() == N - 2 * K + 1);
  // constant configuration over time gives a constant field
  for (int j = 0; j < f.cells(); ++j) {
    CHECK(f.values(0, j) == f.values(1, j));
    CHECK(f.values(1, j) == f.values(2, j));
  }
  // convex combinations of occupancies stay in [0,1]
  CHECK((f.values.array() >= 0).all());
  CHECK((f.values.array() <= 1).all());
  CHECK(f.cell_center(0) == doctest::Approx(static_cast<double>(K) / N));
}

TEST_CASE("field is monotone in the configuration") {
  const int N = 120, K = 10;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto lo = random_config(N, 0.4, 100 + seed);
    auto extra = random_config(N, 0.2, 200 + seed);
    Configuration hi = lo;
    hi.mass = 0;
    for (int i = 0; i <= N; ++i) {
      hi.occ[i] = lo.occ[i] | extra.occ[i];
      hi.mass += hi.occ[i];
    }
    auto rl = block_average_row(lo, K);
    auto rh = block_average_row(hi, K);
    CHECK((rh >= rl).all());
  }
}

TEST_CASE("pairing vs integrated field discrepancy is O(K/N)") {
  const int N = 400, K = 24;
  auto psi = [](double x) { return x * x; };  // |psi| <= 1, |psi'| <= 2
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto c = random_config(N, 0.55, 300 + seed);
    const double pairing = empirical_pairing(c, psi);
    auto row = block_average_row(c, K);
    double integral = 0;
    for (int i = K; i <= N - K; ++i)
      integral += row[i - K] * psi(static_cast<double>(i) / N) / N;
    CHECK(std::abs(pairing - integral) <= 6.0 * K / N);
  }
}

TEST_CASE("boundary block averages on frozen configurations") {
  const int N = 100;
  Trajectory traj;
  traj.times = {0.0, 0.25, 0.5, 0.75, 1.0};
  auto ones = Configuration::ones(N);
  traj.snapshots.assign(5, ones);

  for (double y : {0.05, 0.2, 0.4}) {
    auto b = boundary_block_time_average(traj, y, 1.0, Edge::Left);
    CHECK(b.value == doctest::Approx(1.0).epsilon(1e-14));
    auto br = boundary_block_time_average(traj, y, 1.0, Edge::Right);
    CHECK(br.value == doctest::Approx(1.0).epsilon(1e-14));
  }

  traj.snapshots.assign(5, Configuration::zeros(N));
  CHECK(boundary_block_time_average(traj, 0.1, 1.0).value == 0.0);

  // horizon between snapshots: linear interpolation of the block density
  Trajectory tr2;
  tr2.times = {0.0, 1.0};
  tr2.snapshots = {Configuration::zeros(N), Configuration::ones(N)};
  auto b2 = boundary_block_time_average(tr2, 0.1, 0.5, Edge::Left);
  // density ramps 0 -> 1; integral over [0, 0.5] of the interpolant is 1/16...
  // trapezoid with interpolated endpoint: 0.5 * (0 + 0.5) * 0.5 = 0.125
  CHECK(b2.value == doctest::Approx(0.125));

  // spacing check flags sparse snapshots when inf V is supplied
  auto b3 = boundary_block_time_average(traj, 0.1, 1.0, Edge::Left, 100.0);
  CHECK_FALSE(b3.density_ok);

  CHECK_THROWS(boundary_block_time_average(traj, 0.7, 1.0));
}

TEST_CASE("boundary block tracks the reservoir density of a stationary chain") {
  // matched symmetric dynamics as in the stationarity test; the block time
  // average over [0,t] approximates t * rho
  const int N = 16;
  const double r = 0.3, V = 100.0, T = 10.0;
  auto lat = discretize(make_constant_profile(V, r), N);
  ScalingScheme s = ScalingScheme::with_defaults(N, 0.5);
  s.sigma = 4.0;
  const double out = 0.3, in = out * r / (1 - r);
  s.bd = BoundaryRates{in, out, in, out};
  Rng rng(17);
  auto init = sample_initial([r](double) { return r; }, N, rng);
  std::vector<double> obs;
  const int n_obs = 4000;
  for (int i = 0; i <= n_obs; ++i) obs.push_back(T * i / n_obs);
  auto traj = simulate(init, s, lat, obs, 1001);
  auto b = boundary_block_time_average(traj, 0.2, T, Edge::Left, V);
  CHECK(b.density_ok);
  CHECK(std::abs(b.value - T * r) < 0.35);  // ~3 sigma of the ergodic average
}
