#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hydrolim/quadrature.hpp"

using namespace hydrolim;

TEST_CASE("smooth integrals against antiderivatives") {
  auto r = quad::integrate([](double x) { return std::sin(x); }, 0, 1, 1e-12);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1 - std::cos(1.0)).epsilon(1e-12));

  r = quad::integrate([](double x) { return std::exp(3 * x); }, -1, 2, 1e-12);
  CHECK(r.value == doctest::Approx((std::exp(6.0) - std::exp(-3.0)) / 3).epsilon(1e-12));

  r = quad::integrate([](double) { return 2.0; }, 0.25, 0.75, 1e-12);
  CHECK(r.value == doctest::Approx(1.0));
}

TEST_CASE("integrable endpoint singularities converge") {
  // x^{-1/2}: integral over (0,1] is 2
  auto t = quad::integrate_singular_lower(
      [](double x) { return 1.0 / std::sqrt(x); }, 0, 1, 1e-10);
  CHECK(t.converged);
  CHECK_FALSE(t.diverged);
  CHECK(t.value == doctest::Approx(2.0).epsilon(1e-8));

  // mirrored version
  t = quad::integrate_singular_upper(
      [](double x) { return 1.0 / std::sqrt(1 - x); }, 0, 1, 1e-10);
  CHECK(t.converged);
  CHECK(t.value == doctest::Approx(2.0).epsilon(1e-8));

  // regular integrand is handled too
  t = quad::integrate_singular_lower([](double x) { return x * x; }, 0, 1, 1e-12);
  CHECK(t.converged);
  CHECK(t.value == doctest::Approx(1.0 / 3).epsilon(1e-9));
}

TEST_CASE("non-integrable tails are flagged divergent") {
  auto t = quad::integrate_singular_lower([](double x) { return 1.0 / x; }, 0, 0.5, 1e-10);
  CHECK(t.diverged);
  CHECK_FALSE(t.converged);

  t = quad::integrate_singular_lower([](double x) { return 1.0 / (x * x); }, 0, 0.5, 1e-10);
  CHECK(t.diverged);

  t = quad::integrate_singular_upper([](double x) { return 1.0 / (1 - x); }, 0.5, 1, 1e-10);
  CHECK(t.diverged);
}
