#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "hydrolim/profiles.hpp"

namespace hydrolim {

// Macroscopic flux J(u) = (2p-1) u (1-u) and its derivative.
inline double flux_J(double u, double p) { return (2 * p - 1) * u * (1 - u); }
inline double flux_J_prime(double u, double p) { return (2 * p - 1) * (1 - 2 * u); }

// Godunov flux for the concave J: exact local Riemann flux
//   uL <= uR : min(J(uL), J(uR));  uL > uR : J evaluated at 1/2 clamped into
//   [uR, uL] (the maximum over the interval). Inputs outside [0,1] rejected.
double godunov_flux(double uL, double uR, double p);

// Exact relaxation u' = -vbar (u - rhobar) over dt; vbar = +inf pins to rhobar.
double relax_exact(double u, double vbar, double rhobar, double dt);

// Cell-averaged state of the balance law on a uniform M-grid of [0,1],
// with the per-cell averaged potential (extended reals) and V-weighted
// reservoir target, plus Dirichlet ghost values rho(0), rho(1).
struct DensityField {
  int M = 0;
  double p = 1.0;
  double time = 0;
  Eigen::ArrayXd u;
  Eigen::ArrayXd vbar;
  Eigen::ArrayXd rhobar;
  double ghost_left = 0.5, ghost_right = 0.5;

  double dx() const { return 1.0 / M; }
  double cell_center(int j) const { return (j + 0.5) / M; }
};

// Builds the field from midpoint-rule cell averages of u0. M >= 8 enforced.
DensityField make_density_field(const ProfilePair& profile, int M, double p,
                                const std::function<double(double)>& u0,
                                double quad_tol = 1e-10);

// One Strang step: half relaxation, Godunov transport with Dirichlet ghosts,
// half relaxation. Rejects dt above the CFL bound dx/(2p-1). The state stays
// in [0,1].
void advance(DensityField& f, double dt);

struct SolveResult {
  DensityField grid;  // final state; carries vbar/rhobar and metadata
  std::vector<double> times;
  std::vector<Eigen::ArrayXd> states;
};

// Time-marched entropy solution sampled exactly at the requested times.
SolveResult solve(const std::function<double(double)>& u0,
                  const ProfilePair& profile, double p, int M,
                  double cfl_factor, const std::vector<double>& obs_times);

// Entropy solution of the homogeneous (V == 0) Riemann problem: admissible
// shock for uL < uR (speed (2p-1)(1-uL-uR)), rarefaction for uL > uR.
double riemann_exact(double uL, double uR, double p, double t, double x, double x0);

// Convex C^2 entropy with companion flux, q' = J' f'.
struct EntropyFluxPair {
  std::function<double(double)> f;
  std::function<double(double)> f_prime;
  std::function<double(double)> q;
  std::optional<double> center;
  double delta = 0;
};

// Smoothed Kruzhkov pair centered at k: f(u) = sqrt((u-k)^2 + d^2) - d, with
// q accumulated by quadrature and tabulated (cubic Hermite, refined near k).
EntropyFluxPair kruzhkov_pair(double k, double delta, double p);

}  // namespace hydrolim
