#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "hydrolim/profiles.hpp"

using namespace hydrolim;

namespace {

std::vector<double> dyadic_scales(int n = 12, double y0 = 0.2) {
  std::vector<double> g;
  for (int k = 0; k < n; ++k) g.push_back(y0 * std::ldexp(1.0, -k));
  return g;
}

}  // namespace

TEST_CASE("power family closed forms") {
  auto pp = make_example_profile(1.0, 0.5, 0.5);
  CHECK(pp.V(0.5) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(pp.rho(0.5) == doctest::Approx(0.5).epsilon(1e-14));

  auto pq = make_example_profile(1.0, 0.2, 0.8);
  CHECK(pq.rho(0.5) == doctest::Approx(0.5).epsilon(1e-14));

  // endpoint limits are exact
  CHECK(pq.rho(0.0) == 0.2);
  CHECK(pq.rho(1.0) == 0.8);
  CHECK(pq.rho_left == 0.2);
  CHECK(pq.rho_right == 0.8);

  CHECK_THROWS(make_example_profile(0.0, 0.5, 0.5));
  CHECK_THROWS(make_example_profile(-1.0, 0.5, 0.5));
  CHECK_THROWS(make_example_profile(1.0, 0.0, 0.5));
  CHECK_THROWS(make_example_profile(1.0, 0.5, 1.0));
}

TEST_CASE("source term splits into the two reservoir power laws") {
  const double g = 2.0, r0 = 0.3, r1 = 0.7;
  auto pp = make_example_profile(g, r0, r1);
  const double x = 0.25, u = 0.6;
  const double via_profile = pp.V(x) * (u - pp.rho(x));
  const double direct = (u - r0) / std::pow(x, g) + (u - r1) / std::pow(1 - x, g);
  CHECK(via_profile == doctest::Approx(direct).epsilon(1e-12));

  // a few more points of the same identity
  for (double xx : {0.1, 0.5, 0.9}) {
    for (double uu : {0.0, 0.35, 1.0}) {
      const double a = pp.V(xx) * (uu - pp.rho(xx));
      const double b = (uu - r0) / std::pow(xx, g) + (uu - r1) / std::pow(1 - xx, g);
      CHECK(a == doctest::Approx(b).epsilon(1e-11));
    }
  }
}

TEST_CASE("condition audit on the gamma=1 profile") {
  auto pp = make_example_profile(1.0, 0.2, 0.8);
  const auto scales = dyadic_scales();
  const auto rep = check_conditions(pp, scales, 1e-9);

  CHECK(rep.nonintegrable_left.verdict);
  CHECK(rep.nonintegrable_left.conclusive);
  CHECK(rep.nonintegrable_right.verdict);

  // partial integrals of V = 1/(x(1-x)) down to scale y: log((1-y)/y)
  for (std::size_t k = 0; k < scales.size(); ++k) {
    const double y = scales[k];
    CHECK(rep.nonintegrable_left.values[k] ==
          doctest::Approx(std::log((1 - y) / y)).epsilon(1e-7));
  }

  // 1/V = x(1-x) at both edges: y^-2 int_0^y = 1/2 - y/3 per term
  CHECK(rep.cond_v1.verdict);
  CHECK(rep.cond_v1.conclusive);
  for (std::size_t k = 0; k < scales.size(); ++k) {
    const double y = scales[k];
    CHECK(rep.cond_v1_left_term[k] == doctest::Approx(0.5 - y / 3).epsilon(1e-6));
    CHECK(rep.cond_v1.values[k] == doctest::Approx(1.0 - 2 * y / 3).epsilon(1e-6));
  }
  // the smallest-scale estimate: 1/2 per edge term, 1 for the sum
  CHECK(rep.cond_v1_left_term.back() == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(rep.cond_v1.values.back() == doctest::Approx(1.0).epsilon(1e-3));

  // V (rho - rho0)^2 = (rho1-rho0)^2 x/(1-x): integral -y - log(1-y)
  CHECK(rep.cond_v2.verdict);
  const double c = (0.8 - 0.2) * (0.8 - 0.2);
  for (std::size_t k = 0; k < scales.size(); ++k) {
    const double y = scales[k];
    CHECK(rep.cond_v2_left[k] ==
          doctest::Approx(c * (-y - std::log1p(-y))).epsilon(1e-6));
  }

  // y inf V = 1/(1-y) -> 1, which is finite: the pointwise growth condition
  // genuinely fails at gamma = 1 even though v1 holds
  CHECK_FALSE(rep.cond_v3.verdict);
  CHECK(rep.cond_v3.values.back() == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("condition audit across the family dichotomy") {
  // integrable regime
  {
    auto pp = make_example_profile(0.5, 0.3, 0.6);
    const auto rep = check_conditions(pp, dyadic_scales(), 1e-9);
    CHECK_FALSE(rep.nonintegrable_left.verdict);
    CHECK(rep.nonintegrable_left.conclusive);
    CHECK_FALSE(rep.nonintegrable_right.verdict);
    CHECK_FALSE(rep.cond_v1.verdict);  // reciprocal estimate grows like y^{-1/2}
    CHECK(rep.cond_v2.verdict);
  }
  // strongly diverging regime: all conditions including pointwise growth
  for (double g : {1.5, 2.0}) {
    auto pp = make_example_profile(g, 0.2, 0.8);
    const auto rep = check_conditions(pp, dyadic_scales(), 1e-9);
    CHECK(rep.nonintegrable_left.verdict);
    CHECK(rep.cond_v1.verdict);
    CHECK(rep.cond_v2.verdict);
    CHECK(rep.cond_v3.verdict);
    // v1 implies non-integrability (Cauchy-Schwarz); audit must agree
    if (rep.cond_v1.verdict) {
      CHECK(rep.nonintegrable_left.verdict);
      CHECK(rep.nonintegrable_right.verdict);
    }
  }
  // constant rho: v2 evidence is identically zero
  {
    auto pp = make_example_profile(1.0, 0.5, 0.5);
    const auto rep = check_conditions(pp, dyadic_scales(), 1e-9);
    CHECK(rep.cond_v2.verdict);
    for (double v : rep.cond_v2.values) CHECK(std::abs(v) < 1e-12);
  }
}

TEST_CASE("check_conditions rejects bad scale grids") {
  auto pp = make_example_profile(1.0, 0.2, 0.8);
  CHECK_THROWS(check_conditions(pp, {0.6, 0.1}, 1e-8));       // outside (0, 1/2)
  CHECK_THROWS(check_conditions(pp, {0.1, 0.2}, 1e-8));       // not decreasing
  CHECK_THROWS(check_conditions(pp, {}, 1e-8));               // empty
}

TEST_CASE("lattice discretization") {
  auto pp = make_example_profile(1.0, 0.2, 0.8);
  auto lat = discretize(pp, 4);
  CHECK(lat.V[1] == doctest::Approx(4.0 + 4.0 / 3).epsilon(1e-14));
  CHECK(lat.rho[0] == 0.2);
  CHECK(lat.rho[4] == 0.8);

  auto lat1000 = discretize(pp, 1000);
  CHECK(lat1000.V[1] == doctest::Approx(1000.0 + 1000.0 / 999).epsilon(1e-12));

  auto cp = make_constant_profile(0.0, 0.5);
  auto latc = discretize(cp, 16);
  for (int i = 1; i < 16; ++i) {
    CHECK(latc.V[i] == 0.0);
    CHECK(latc.rho[i] == 0.5);
  }
}

TEST_CASE("cell averages of the potential") {
  auto pp = make_example_profile(1.0, 0.2, 0.8);

  // boundary cell diverges and pins the reservoir limit
  auto ca0 = cell_average_potential(pp, 8, 0);
  CHECK(std::isinf(ca0.vbar));
  CHECK(ca0.rhobar == 0.2);
  auto ca7 = cell_average_potential(pp, 8, 7);
  CHECK(std::isinf(ca7.vbar));
  CHECK(ca7.rhobar == 0.8);

  // interior cell against the closed-form antiderivative
  auto ca3 = cell_average_potential(pp, 8, 3);
  CHECK(ca3.vbar ==
        doctest::Approx(8 * (std::log(4.0 / 3) + std::log(5.0 / 4))).epsilon(1e-10));

  // constant potential: exact mean on every cell
  auto cp = make_constant_profile(2.0, 0.4);
  for (int j : {0, 3, 7}) {
    auto ca = cell_average_potential(cp, 8, j);
    CHECK(ca.vbar == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(ca.rhobar == doctest::Approx(0.4).epsilon(1e-12));
  }

  // pointwise evaluation and cell mean agree to O(1/M) where V is bounded
  const int M = 64;
  for (int j : {8, 20, 31, 50}) {
    auto ca = cell_average_potential(pp, M, j);
    const double mid = pp.V((j + 0.5) / M);
    CHECK(std::abs(ca.vbar - mid) < 40.0 / M);
  }
}

TEST_CASE("tabulated profiles") {
  auto pp = make_tabulated_profile({{0.0, 0.0}, {1.0, 0.0}},
                                   {{0.0, 0.3}, {1.0, 0.7}});
  CHECK(pp.V(0.37) == 0.0);
  CHECK(pp.rho(0.5) == doctest::Approx(0.5));
  CHECK(pp.rho_left == doctest::Approx(0.3));
  CHECK(pp.rho_right == doctest::Approx(0.7));

  // clamped outside the tabulated range
  auto pv = make_tabulated_profile({{0.2, 1.0}, {0.8, 3.0}}, {{0.0, 0.5}, {1.0, 0.5}});
  CHECK(pv.V(0.1) == 1.0);
  CHECK(pv.V(0.9) == 3.0);
  CHECK(pv.V(0.5) == doctest::Approx(2.0));

  CHECK_THROWS(make_tabulated_profile({{0.0, -1.0}, {1.0, 0.0}}, {{0.0, 0.5}, {1.0, 0.5}}));
  CHECK_THROWS(make_tabulated_profile({{0.0, 0.0}, {1.0, 0.0}}, {{0.0, 0.0}, {1.0, 0.5}}));
  CHECK_THROWS(make_tabulated_profile({{0.5, 0.0}, {0.5, 1.0}}, {{0.0, 0.5}, {1.0, 0.5}}));

  // V == 0 cells fall back to the midpoint reservoir value
  auto ca = cell_average_potential(pp, 8, 3);
  CHECK(ca.vbar == 0.0);
  CHECK(ca.rhobar == doctest::Approx(pp.rho(0.4375)));
}
