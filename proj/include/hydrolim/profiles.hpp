#pragma once

#include <Eigen/Core>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hydrolim {

// Potential V and reservoir profile rho. V is defined on (0,1) and may blow
// up at the endpoints; rho maps [0,1] into (0,1). rho_left/rho_right hold the
// endpoint limits rho(0), rho(1), which for diverging V are the values the
// dynamics pins at the boundary.
struct ProfilePair {
  std::function<double(double)> V;
  std::function<double(double)> rho;
  double rho_left = 0.5;
  double rho_right = 0.5;
  std::optional<double> gamma;
  std::string family = "custom";
};

// Built-in family V(x) = x^-g + (1-x)^-g with the matched reservoir profile;
// the resulting source splits into two power-law reservoir terms, one per
// boundary. Rejects g <= 0 and boundary densities outside (0,1).
ProfilePair make_example_profile(double gamma, double rho0, double rho1);

// V and rho constant. v0 = 0 is allowed (inert relaxation field, used by the
// transport-only test regimes).
ProfilePair make_constant_profile(double v0, double r0);

// Piecewise-linear tabulations, clamped outside the tabulated range. Tables
// must be sorted by x; V >= 0 and rho in (0,1) are enforced.
ProfilePair make_tabulated_profile(std::vector<std::pair<double, double>> v_tab,
                                   std::vector<std::pair<double, double>> rho_tab);

// Loads two-column text tables (x value per line, '#' comments allowed).
ProfilePair load_tabulated_profile(const std::string& v_path,
                                   const std::string& rho_path);

// One audited condition: per-scale evidence values over a decreasing y-grid,
// the boolean verdict, and whether the quadrature was conclusive.
struct ConditionEvidence {
  std::vector<double> values;
  bool verdict = false;
  bool conclusive = false;
};

struct ConditionReport {
  std::vector<double> y_grid;
  ConditionEvidence nonintegrable_left;   // partial integrals of V toward 0
  ConditionEvidence nonintegrable_right;  // partial integrals of V toward 1
  ConditionEvidence cond_v1;  // y^-2 int_0^y [1/V(x) + 1/V(1-x)] dx
  std::vector<double> cond_v1_left_term;   // y^-2 int_0^y 1/V(x) dx
  std::vector<double> cond_v1_right_term;  // y^-2 int_0^y 1/V(1-x) dx
  ConditionEvidence cond_v2;  // sum of the two V-weighted deviation integrals
  std::vector<double> cond_v2_left, cond_v2_right;
  ConditionEvidence cond_v3;  // min over edges of y * inf V near the edge
  double divergence_threshold = 1e3;
  // finite-difference spot check of rho'': max |rho''| over a scan grid
  double rho_second_derivative_max = 0;
};

ConditionReport check_conditions(const ProfilePair& profile,
                                 std::vector<double> y_grid,
                                 double quad_tol = 1e-8,
                                 double divergence_threshold = 1e3);

// Lattice evaluation V_i = V(i/N), rho_i = rho(i/N). Entries 0 and N are not
// used by the interior relaxation rates; rho there carries the endpoint
// limits for convenience.
struct LatticeProfile {
  int N = 0;
  Eigen::ArrayXd V;
  Eigen::ArrayXd rho;
};

LatticeProfile discretize(const ProfilePair& profile, int N);

// Cell data for the finite-volume source treatment on a uniform M-grid:
// vbar = M * integral of V over cell j (== +infinity when the integral
// diverges, possible only in the two boundary cells), and the V-weighted
// reservoir mean rhobar = int V rho / int V, which for a divergent cell is
// the endpoint limit of rho. For a cell where V vanishes identically, rhobar
// falls back to the midpoint value of rho (the relaxation is inert there).
struct CellAverage {
  double vbar = 0;
  double rhobar = 0.5;
};

CellAverage cell_average_potential(const ProfilePair& profile, int M, int j,
                                   double quad_tol = 1e-10);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace hydrolim
