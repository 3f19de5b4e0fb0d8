#include "hydrolim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hydrolim/quadrature.hpp"

namespace hydrolim {

GridField to_grid(const EmpiricalField& f) {
  GridField g;
  g.x0 = static_cast<double>(f.K) / f.N;
  g.dx = 1.0 / f.N;
  g.n = f.cells();
  g.times = f.times;
  g.values = f.values;
  return g;
}

GridField to_grid(const SolveResult& s) {
  GridField g;
  g.dx = 1.0 / s.grid.M;
  g.x0 = 0.5 * g.dx;
  g.n = s.grid.M;
  g.times = s.times;
  g.values.resize(static_cast<Eigen::Index>(s.states.size()), s.grid.M);
  for (std::size_t r = 0; r < s.states.size(); ++r)
    g.values.row(static_cast<Eigen::Index>(r)) = s.states[r].transpose();
  g.vbar = s.grid.vbar;
  g.rhobar = s.grid.rhobar;
  return g;
}

void attach_source_data(GridField& f, const ProfilePair& profile, double quad_tol) {
  f.vbar.resize(f.n);
  f.rhobar.resize(f.n);
  for (int j = 0; j < f.n; ++j) {
    const double lo = f.cell_center(j) - 0.5 * f.dx;
    const double hi = f.cell_center(j) + 0.5 * f.dx;
    if (lo <= 1e-15 || hi >= 1 - 1e-15) {
      // genuine boundary cell: delegate to the singularity-aware path
      const int M = static_cast<int>(std::lround(1.0 / f.dx));
      const int jj = lo <= 1e-15 ? 0 : M - 1;
      const CellAverage ca = cell_average_potential(profile, M, jj, quad_tol);
      f.vbar[j] = ca.vbar;
      f.rhobar[j] = ca.rhobar;
      continue;
    }
    const auto vi = quad::integrate(profile.V, lo, hi, quad_tol);
    if (!vi.converged)
      throw std::runtime_error("attach_source_data: quadrature failed on interior cell");
    const auto vr = quad::integrate(
        [&](double x) { return profile.V(x) * profile.rho(x); }, lo, hi, quad_tol);
    f.vbar[j] = vi.value / f.dx;
    f.rhobar[j] = vi.value > 1e-300 ? vr.value / vi.value
                                    : profile.rho(0.5 * (lo + hi));
  }
}

namespace {

// midpoint time weight; rows are samples of a uniform partition
double time_weight(const GridField& f) {
  if (f.times.size() < 2)
    throw std::invalid_argument("field functional: need at least two time samples");
  const double dt = f.times[1] - f.times[0];
  for (std::size_t r = 2; r < f.times.size(); ++r)
    if (std::abs((f.times[r] - f.times[r - 1]) - dt) > 1e-9 * std::max(1.0, dt))
      throw std::invalid_argument("field functional: time samples must be uniform");
  return dt;
}

void check_support(const GridField& f, const BumpTestFunction& phi) {
  if (phi.x0 - phi.rx < f.x_min() - 1e-12 || phi.x0 + phi.rx > f.x_max() + 1e-12)
    throw std::invalid_argument("test function support escapes the field domain");
}

}  // namespace

double entropy_production(const GridField& f, const EntropyFluxPair& pair,
                          const BumpTestFunction& phi) {
  check_support(f, phi);
  const double dt = time_weight(f);
  double acc = 0;
  for (std::size_t r = 0; r < f.times.size(); ++r) {
    const double t = f.times[r];
    if (std::abs(t - phi.t0) >= phi.rt) continue;
    for (int j = 0; j < f.n; ++j) {
      const double x = f.cell_center(j);
      if (std::abs(x - phi.x0) >= phi.rx) continue;
      const double u = f.values(static_cast<Eigen::Index>(r), j);
      acc += phi.dt(t, x) * pair.f(u) + phi.dx(t, x) * pair.q(u);
    }
  }
  return -acc * f.dx * dt;
}

double entropy_residual(const GridField& f, const EntropyFluxPair& pair,
                        const BumpTestFunction& phi,
                        const std::function<double(double)>& u0) {
  check_support(f, phi);
  if (!f.has_source_data())
    throw std::invalid_argument("entropy_residual: field lacks vbar/rhobar source data");
  const double dt = time_weight(f);

  double init_term = 0;
  if (std::abs(phi.t0) < phi.rt) {
    for (int j = 0; j < f.n; ++j) {
      const double x = f.cell_center(j);
      const double w = phi(0.0, x);
      if (w > 0) init_term += pair.f(u0(x)) * w;
    }
    init_term *= f.dx;
  }

  double bulk = 0, source = 0;
  for (std::size_t r = 0; r < f.times.size(); ++r) {
    const double t = f.times[r];
    if (std::abs(t - phi.t0) >= phi.rt) continue;
    for (int j = 0; j < f.n; ++j) {
      const double x = f.cell_center(j);
      if (std::abs(x - phi.x0) >= phi.rx) continue;
      const double u = f.values(static_cast<Eigen::Index>(r), j);
      bulk += pair.f(u) * phi.dt(t, x) + pair.q(u) * phi.dx(t, x);
      const double w = phi(t, x);
      if (w > 0) {
        if (std::isfinite(f.vbar[j])) {
          source += pair.f_prime(u) * f.vbar[j] * (u - f.rhobar[j]) * w;
        } else if (u != f.rhobar[j]) {
          return -kInf;  // unpinned infinite-V cell inside the support
        }
      }
    }
  }
  return init_term + (bulk - source) * f.dx * dt;
}

double energy_functional(const GridField& f, double T) {
  if (!f.has_source_data())
    throw std::invalid_argument("energy_functional: field lacks vbar/rhobar source data");
  const double dt = time_weight(f);
  double acc = 0;
  for (std::size_t r = 0; r < f.times.size(); ++r) {
    if (f.times[r] > T + 1e-12) break;
    for (int j = 0; j < f.n; ++j) {
      const double d = f.values(static_cast<Eigen::Index>(r), j) - f.rhobar[j];
      if (std::isfinite(f.vbar[j])) {
        acc += f.vbar[j] * d * d;
      } else if (d != 0) {
        return kInf;
      }
    }
  }
  return acc * f.dx * dt;
}

double energy_functional(const GridField& f, const ProfilePair& profile, double T) {
  if (f.has_source_data()) return energy_functional(f, T);
  GridField g = f;
  attach_source_data(g, profile);
  return energy_functional(g, T);
}

namespace {

double trapezoid(const std::vector<double>& times,
                 const std::vector<double>& vals, double T) {
  double acc = 0;
  for (std::size_t r = 1; r < times.size(); ++r) {
    double t1 = times[r], v1 = vals[r];
    const double t0 = times[r - 1], v0 = vals[r - 1];
    if (t0 >= T) break;
    if (t1 > T) {
      const double w = (T - t0) / (t1 - t0);
      v1 = v0 + w * (v1 - v0);
      t1 = T;
    }
    acc += 0.5 * (v0 + v1) * (t1 - t0);
  }
  return acc;
}

}  // namespace

double one_block_residual(const Trajectory& traj, int K, double T, double p) {
  const int N = traj.snapshots.front().N();
  const double lam = 2 * p - 1;
  std::vector<double> vals;
  std::vector<std::uint8_t> bonds(N);
  for (const auto& c : traj.snapshots) {
    for (int i = 0; i < N; ++i) bonds[i] = c.occ[i] & (1 - c.occ[i + 1]);
    // centers K-1..N-K; keep i = K..N-K
    Eigen::ArrayXd jhat = lam * triangular_average(bonds.data(), N, K);
    Eigen::ArrayXd ehat = block_average_row(c, K);
    double s = 0;
    for (int i = K; i <= N - K; ++i) {
      const double d = jhat[i - (K - 1)] - flux_J(ehat[i - K], p);
      s += d * d;
    }
    vals.push_back(s);
  }
  return trapezoid(traj.times, vals, T);
}

double h1_residual(const Trajectory& traj, int K, double T) {
  std::vector<double> vals;
  for (const auto& c : traj.snapshots) {
    Eigen::ArrayXd ehat = block_average_row(c, K);
    double s = 0;
    for (Eigen::Index i = 0; i + 1 < ehat.size(); ++i) {
      const double d = ehat[i + 1] - ehat[i];
      s += d * d;
    }
    vals.push_back(s);
  }
  return trapezoid(traj.times, vals, T);
}

Eigen::ArrayXd restrict_row(const GridField& src, int row, double target_x0,
                            double target_dx, int target_n) {
  Eigen::ArrayXd out(target_n);
  const double s_lo = src.x_min();
  for (int k = 0; k < target_n; ++k) {
    const double L = target_x0 + k * target_dx - 0.5 * target_dx;
    const double R = L + target_dx;
    if (L < s_lo - 1e-12 || R > src.x_max() + 1e-12)
      throw std::invalid_argument("restrict_row: target cell not covered by source field");
    int j = static_cast<int>(std::floor((L - s_lo) / src.dx + 1e-12));
    j = std::max(0, j);
    double acc = 0;
    for (; j < src.n; ++j) {
      const double cl = s_lo + j * src.dx;
      const double cr = cl + src.dx;
      if (cl >= R) break;
      const double overlap = std::min(cr, R) - std::max(cl, L);
      if (overlap > 0) acc += overlap * src.values(row, j);
    }
    out[k] = acc / target_dx;
  }
  return out;
}

std::vector<double> l1_per_time(const GridField& a, const GridField& b) {
  if (a.times.size() != b.times.size())
    throw std::invalid_argument("l1_distance: time lists differ in length");
  for (std::size_t r = 0; r < a.times.size(); ++r)
    if (std::abs(a.times[r] - b.times[r]) > 1e-9 * std::max(1.0, std::abs(a.times[r])))
      throw std::invalid_argument("l1_distance: time lists do not match");

  const GridField& tgt = a.dx >= b.dx ? a : b;
  const GridField& fine = a.dx >= b.dx ? b : a;
  std::vector<double> out;
  out.reserve(a.times.size());
  for (std::size_t r = 0; r < a.times.size(); ++r) {
    const int ri = static_cast<int>(r);
    Eigen::ArrayXd fr = restrict_row(fine, ri, tgt.x0, tgt.dx, tgt.n);
    out.push_back((tgt.values.row(ri).transpose().array() - fr).abs().sum() * tgt.dx);
  }
  return out;
}

double l1_distance(const GridField& a, const GridField& b) {
  const std::vector<double> per_time = l1_per_time(a, b);
  double acc = 0;
  for (double v : per_time) acc += v;
  return acc / static_cast<double>(per_time.size());
}

}  // namespace hydrolim
