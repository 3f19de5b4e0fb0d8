#pragma once

#include <functional>

namespace hydrolim::quad {

struct Result {
  double value = 0;
  double error = 0;
  bool converged = false;
};

// Adaptive Gauss--Kronrod 7/15 on [a,b]. Tolerance is absolute plus relative
// (tol * |value|). Intended for integrands that are smooth inside (a,b).
Result integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10, int max_depth = 48);

// Integral of f over (a,b] where f may be singular (or even non-integrable)
// as x -> a+. Works through geometric slabs [a + w*2^{-k-1}, a + w*2^{-k}],
// w = b-a, accumulating from the widest slab down, so partial sums expose the
// divergence rate. Outcomes:
//   converged : slab increments decayed below tolerance; `value` is the integral
//   diverged  : increments stopped decaying (or partial sums crossed
//               `divergence_threshold` while still growing); `value` is the
//               partial sum at the smallest scale reached
// Neither flag set means the scan was inconclusive at max_slabs.
struct TailResult {
  double value = 0;
  bool converged = false;
  bool diverged = false;
  int slabs = 0;
};

TailResult integrate_singular_lower(const std::function<double(double)>& f,
                                    double a, double b, double tol = 1e-10,
                                    double divergence_threshold = 1e3,
                                    int max_slabs = 160);

// Mirrored version: singularity at the upper endpoint b.
TailResult integrate_singular_upper(const std::function<double(double)>& f,
                                    double a, double b, double tol = 1e-10,
                                    double divergence_threshold = 1e3,
                                    int max_slabs = 160);

}  // namespace hydrolim::quad
