#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "hydrolim/coarsegrain.hpp"
#include "hydrolim/pde.hpp"
#include "hydrolim/profiles.hpp"

namespace hydrolim {

// Common uniform-cell view of a space-time field: cell centers x0 + k*dx,
// one row of `values` per observation time. The analytic functionals treat
// the rows as midpoint samples of a uniform time partition. vbar/rhobar,
// when attached, carry the per-cell source data.
struct GridField {
  double x0 = 0;
  double dx = 0;
  int n = 0;
  std::vector<double> times;
  Eigen::MatrixXd values;
  Eigen::ArrayXd vbar;    // optional (size 0 when absent)
  Eigen::ArrayXd rhobar;  // optional

  double cell_center(int k) const { return x0 + k * dx; }
  double x_min() const { return x0 - 0.5 * dx; }
  double x_max() const { return x0 + (n - 1) * dx + 0.5 * dx; }
  bool has_source_data() const { return vbar.size() == n; }
};

GridField to_grid(const EmpiricalField& f);
GridField to_grid(const SolveResult& s);

// Fills vbar/rhobar on the field's own cells from the profile.
void attach_source_data(GridField& f, const ProfilePair& profile,
                        double quad_tol = 1e-10);

// Tensor bump phi(t,x) = b((t-t0)/rt) * b((x-x0)/rx) with b(s) = (1-s^2)^3 on
// |s| < 1: compactly supported, C^2, nonnegative, closed-form partials.
struct BumpTestFunction {
  double t0 = 0, rt = 1, x0 = 0.5, rx = 0.25;
  double amp = 1.0;

  static double b(double s) {
    if (std::abs(s) >= 1) return 0;
    const double w = 1 - s * s;
    return w * w * w;
  }
  static double db(double s) {
    if (std::abs(s) >= 1) return 0;
    const double w = 1 - s * s;
    return -6 * s * w * w;
  }
  double operator()(double t, double x) const { return amp * b((t - t0) / rt) * b((x - x0) / rx); }
  double dt(double t, double x) const { return amp * db((t - t0) / rt) / rt * b((x - x0) / rx); }
  double dx(double t, double x) const { return amp * b((t - t0) / rt) * db((x - x0) / rx) / rx; }
};

// Entropy production X = -int int [dphi/dt f(u) + dphi/dx q(u)] dx dt by
// midpoint quadrature on the field's native grid. Throws if the spatial
// support of phi escapes the field's domain.
double entropy_production(const GridField& f, const EntropyFluxPair& pair,
                          const BumpTestFunction& phi);

// Left-minus-right value of the generalized entropy inequality:
//   int f(u0) phi(0,.) + int int [f du phi/dt + q dphi/dx]
//     - int int f'(u) V (u - rho) phi.
// Entropy solutions keep it >= -tol(dx, dt, delta). Requires source data.
double entropy_residual(const GridField& f, const EntropyFluxPair& pair,
                        const BumpTestFunction& phi,
                        const std::function<double(double)>& u0);

// int_0^T int V (u - rho)^2 dx dt with the pinned-cell convention
// inf * 0 = 0 on cells where u equals the reservoir target exactly.
double energy_functional(const GridField& f, double T);
double energy_functional(const GridField& f, const ProfilePair& profile, double T);

// Time integral of sum_i (Jhat_i - J(etahat_i))^2 over the band, trapezoid in
// time; the microscopic current is (2p-1) eta_i (1 - eta_{i+1}).
double one_block_residual(const Trajectory& traj, int K, double T, double p);

// Same for the squared gradient of the block average.
double h1_residual(const Trajectory& traj, int K, double T);

// sum |a - b| dx on the coarser field's grid at each matched time, after
// cell-average restriction of the finer field.
std::vector<double> l1_per_time(const GridField& a, const GridField& b);

// Mean over matched times of the above.
double l1_distance(const GridField& a, const GridField& b);

// Cell-average restriction of src onto the (coarser, covered) target layout;
// exposed for the dyadic-consistency checks.
Eigen::ArrayXd restrict_row(const GridField& src, int row, double target_x0,
                            double target_dx, int target_n);

}  // namespace hydrolim
