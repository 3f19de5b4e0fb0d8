#include "hydrolim/pde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hydrolim/quadrature.hpp"

namespace hydrolim {

namespace {

double checked_unit(double u, const char* who) {
  if (!(u >= -1e-9 && u <= 1 + 1e-9))
    throw std::domain_error(std::string(who) + ": state outside [0,1]");
  return std::clamp(u, 0.0, 1.0);
}

}  // namespace

double godunov_flux(double uL, double uR, double p) {
  uL = checked_unit(uL, "godunov_flux");
  uR = checked_unit(uR, "godunov_flux");
  if (uL <= uR) return std::min(flux_J(uL, p), flux_J(uR, p));
  return flux_J(std::min(std::max(0.5, uR), uL), p);
}

double relax_exact(double u, double vbar, double rhobar, double dt) {
  if (dt < 0) throw std::invalid_argument("relax_exact: dt must be >= 0");
  if (!std::isfinite(vbar)) return rhobar;
  return rhobar + (u - rhobar) * std::exp(-vbar * dt);
}

DensityField make_density_field(const ProfilePair& profile, int M, double p,
                                const std::function<double(double)>& u0,
                                double quad_tol) {
  if (M < 8) throw std::invalid_argument("density field: M >= 8 required");
  if (!(p >= 0.5 && p <= 1.0))
    throw std::invalid_argument("density field: p must lie in [1/2, 1]");
  DensityField f;
  f.M = M;
  f.p = p;
  f.u.resize(M);
  f.vbar.resize(M);
  f.rhobar.resize(M);
  for (int j = 0; j < M; ++j) {
    const double uj = u0(f.cell_center(j));
    if (!(uj >= 0 && uj <= 1))
      throw std::invalid_argument("density field: u0 value outside [0,1]");
    f.u[j] = uj;
    const CellAverage ca = cell_average_potential(profile, M, j, quad_tol);
    f.vbar[j] = ca.vbar;
    f.rhobar[j] = ca.rhobar;
  }
  f.ghost_left = profile.rho_left;
  f.ghost_right = profile.rho_right;
  return f;
}

namespace {

void relax_half(DensityField& f, double dt_half) {
  // exp(-inf * dt) evaluates to 0, which is exactly the pinned boundary cell
  f.u = f.rhobar + (f.u - f.rhobar) * (-f.vbar * dt_half).exp();
}

void transport(DensityField& f, double dt) {
  const int M = f.M;
  const double lam = dt * M;  // dt/dx
  static thread_local Eigen::ArrayXd flux;
  flux.resize(M + 1);
  flux[0] = godunov_flux(f.ghost_left, f.u[0], f.p);
  for (int j = 1; j < M; ++j) flux[j] = godunov_flux(f.u[j - 1], f.u[j], f.p);
  flux[M] = godunov_flux(f.u[M - 1], f.ghost_right, f.p);
  for (int j = 0; j < M; ++j)
    f.u[j] = std::clamp(f.u[j] - lam * (flux[j + 1] - flux[j]), 0.0, 1.0);
}

}  // namespace

void advance(DensityField& f, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("advance: dt must be > 0");
  const double drift = 2 * f.p - 1;
  if (drift > 0 && dt > f.dx() / drift * (1 + 1e-9))
    throw std::invalid_argument("advance: CFL violation, need dt <= dx/(2p-1)");
  relax_half(f, 0.5 * dt);
  transport(f, dt);
  relax_half(f, 0.5 * dt);
  f.time += dt;
}

SolveResult solve(const std::function<double(double)>& u0,
                  const ProfilePair& profile, double p, int M,
                  double cfl_factor, const std::vector<double>& obs_times) {
  if (!(cfl_factor > 0 && cfl_factor <= 1))
    throw std::invalid_argument("solve: cfl_factor must lie in (0,1]");
  for (std::size_t k = 0; k < obs_times.size(); ++k)
    if (obs_times[k] < 0 || (k > 0 && obs_times[k] < obs_times[k - 1]))
      throw std::invalid_argument("solve: observation times must be nondecreasing and >= 0");

  DensityField f = make_density_field(profile, M, p, u0);
  const double drift = 2 * p - 1;
  const double dt_max = drift > 0 ? cfl_factor / (M * drift) : cfl_factor / M;

  SolveResult out;
  out.times = obs_times;
  for (double target : obs_times) {
    const double seg = target - f.time;
    if (seg > 1e-14) {
      const int steps = std::max(1, static_cast<int>(std::ceil(seg / dt_max - 1e-12)));
      const double dt = seg / steps;
      for (int s = 0; s < steps; ++s) advance(f, dt);
      f.time = target;  // absorb accumulated round-off
    }
    out.states.push_back(f.u);
  }
  out.grid = f;
  return out;
}

double riemann_exact(double uL, double uR, double p, double t, double x, double x0) {
  if (!(t > 0)) throw std::invalid_argument("riemann_exact: t must be > 0");
  uL = checked_unit(uL, "riemann_exact");
  uR = checked_unit(uR, "riemann_exact");
  const double lam = 2 * p - 1;
  const double xi = (x - x0) / t;
  if (uL == uR) return uL;
  if (lam == 0) return x < x0 ? uL : uR;  // flux vanishes identically
  if (uL < uR) {
    const double s = lam * (1 - uL - uR);
    return xi < s ? uL : uR;
  }
  const double a = flux_J_prime(uL, p);
  const double b = flux_J_prime(uR, p);
  if (xi <= a) return uL;
  if (xi >= b) return uR;
  return 0.5 * (1 - xi / lam);
}

// ============================================================================
// Smoothed Kruzhkov pairs
// ============================================================================

namespace {

// Cubic Hermite interpolation table on a uniform grid, with exact nodal
// derivatives supplied by the caller.
struct HermiteTable {
  double lo = 0, hi = 1, h = 1;
  Eigen::ArrayXd val, der;

  double eval(double x) const {
    const double xc = std::clamp(x, lo, hi);
    const int n = static_cast<int>(val.size()) - 1;
    int i = std::min(n - 1, std::max(0, static_cast<int>((xc - lo) / h)));
    const double t = (xc - (lo + i * h)) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * val[i] + (t3 - 2 * t2 + t) * h * der[i] +
           (-2 * t3 + 3 * t2) * val[i + 1] + (t3 - t2) * h * der[i + 1];
  }
};

HermiteTable build_flux_table(double lo, double hi, int n, double k,
                              double delta, double p, double q_lo) {
  HermiteTable tab;
  tab.lo = lo;
  tab.hi = hi;
  tab.h = (hi - lo) / (n - 1);
  tab.val.resize(n);
  tab.der.resize(n);
  auto fp = [k, delta](double u) {
    const double w = u - k;
    return w / std::sqrt(w * w + delta * delta);
  };
  auto integrand = [&, p](double u) { return flux_J_prime(u, p) * fp(u); };
  double acc = q_lo;
  for (int i = 0; i < n; ++i) {
    const double x = lo + i * tab.h;
    if (i > 0) acc += quad::integrate(integrand, x - tab.h, x, 1e-13, 16).value;
    tab.val[i] = acc;
    tab.der[i] = integrand(x);
  }
  return tab;
}

}  // namespace

EntropyFluxPair kruzhkov_pair(double k, double delta, double p) {
  if (!(delta > 0)) throw std::invalid_argument("kruzhkov_pair: delta must be > 0");
  if (!(k >= 0 && k <= 1)) throw std::invalid_argument("kruzhkov_pair: k must lie in [0,1]");

  // Global coarse table plus a fine patch around the kink scale delta.
  const double wlo = std::max(0.0, k - 64 * delta);
  const double whi = std::min(1.0, k + 64 * delta);
  auto coarse = std::make_shared<HermiteTable>(build_flux_table(0.0, 1.0, 8193, k, delta, p, 0.0));
  // anchor both tables so that q(k) = 0
  auto fine = std::make_shared<HermiteTable>(
      build_flux_table(wlo, whi, 4097, k, delta, p, coarse->eval(wlo)));
  const double qk = fine->eval(k);
  coarse->val -= qk;
  fine->val -= qk;

  EntropyFluxPair pair;
  pair.center = k;
  pair.delta = delta;
  pair.f = [k, delta](double u) {
    const double w = u - k;
    return std::sqrt(w * w + delta * delta) - delta;
  };
  pair.f_prime = [k, delta](double u) {
    const double w = u - k;
    return w / std::sqrt(w * w + delta * delta);
  };
  pair.q = [coarse, fine, wlo, whi](double u) {
    if (u >= wlo && u <= whi) return fine->eval(u);
    return coarse->eval(u);
  };
  return pair;
}

}  // namespace hydrolim
