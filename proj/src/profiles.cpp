#include "hydrolim/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hydrolim/quadrature.hpp"

namespace hydrolim {

namespace {

double lerp_table(const std::vector<std::pair<double, double>>& tab, double x) {
  if (x <= tab.front().first) return tab.front().second;
  if (x >= tab.back().first) return tab.back().second;
  auto it = std::upper_bound(tab.begin(), tab.end(), x,
                             [](double v, const auto& p) { return v < p.first; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (x - lo.first) / (hi.first - lo.first);
  return lo.second + w * (hi.second - lo.second);
}

void validate_table(const std::vector<std::pair<double, double>>& tab,
                    const char* name) {
  if (tab.size() < 2) throw std::invalid_argument(std::string(name) + ": need at least two rows");
  for (std::size_t i = 1; i < tab.size(); ++i) {
    if (!(tab[i].first > tab[i - 1].first))
      throw std::invalid_argument(std::string(name) + ": x column must be strictly increasing");
  }
}

std::vector<std::pair<double, double>> read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open table file: " + path);
  std::vector<std::pair<double, double>> tab;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double x, v;
    if (ls >> x >> v) tab.emplace_back(x, v);
  }
  return tab;
}

}  // namespace

ProfilePair make_example_profile(double gamma, double rho0, double rho1) {
  if (!(gamma > 0)) throw std::invalid_argument("example profile: gamma must be > 0");
  if (!(rho0 > 0 && rho0 < 1) || !(rho1 > 0 && rho1 < 1))
    throw std::invalid_argument("example profile: boundary densities must lie in (0,1)");
  ProfilePair pp;
  pp.gamma = gamma;
  pp.rho_left = rho0;
  pp.rho_right = rho1;
  pp.family = "power";
  pp.V = [gamma](double x) {
    if (x <= 0 || x >= 1) return kInf;
    return std::pow(x, -gamma) + std::pow(1 - x, -gamma);
  };
  pp.rho = [gamma, rho0, rho1](double x) {
    if (x <= 0) return rho0;
    if (x >= 1) return rho1;
    const double a = std::pow(1 - x, gamma);
    const double b = std::pow(x, gamma);
    return (rho0 * a + rho1 * b) / (a + b);
  };
  return pp;
}

ProfilePair make_constant_profile(double v0, double r0) {
  if (!(v0 >= 0)) throw std::invalid_argument("constant profile: V must be >= 0");
  if (!(r0 > 0 && r0 < 1)) throw std::invalid_argument("constant profile: rho must lie in (0,1)");
  ProfilePair pp;
  pp.rho_left = pp.rho_right = r0;
  pp.family = "constant";
  pp.V = [v0](double) { return v0; };
  pp.rho = [r0](double) { return r0; };
  return pp;
}

ProfilePair make_tabulated_profile(std::vector<std::pair<double, double>> v_tab,
                                   std::vector<std::pair<double, double>> rho_tab) {
  validate_table(v_tab, "V table");
  validate_table(rho_tab, "rho table");
  for (const auto& [x, v] : v_tab)
    if (!(v >= 0)) throw std::invalid_argument("V table: values must be >= 0");
  for (const auto& [x, r] : rho_tab)
    if (!(r > 0 && r < 1)) throw std::invalid_argument("rho table: values must lie in (0,1)");
  ProfilePair pp;
  pp.family = "tabulated";
  pp.rho_left = lerp_table(rho_tab, 0.0);
  pp.rho_right = lerp_table(rho_tab, 1.0);
  pp.V = [tab = std::move(v_tab)](double x) { return lerp_table(tab, x); };
  pp.rho = [tab = std::move(rho_tab)](double x) { return lerp_table(tab, x); };
  return pp;
}

ProfilePair load_tabulated_profile(const std::string& v_path,
                                   const std::string& rho_path) {
  return make_tabulated_profile(read_table(v_path), read_table(rho_path));
}

namespace {

double inf_on_interval(const std::function<double(double)>& f, double lo,
                       double hi, int samples = 129) {
  // Log-spaced scan biased toward lo; the audited potentials are monotone
  // near the edge, so a scan is adequate for an evidence value.
  double m = f(hi);
  const double ratio = lo > 0 ? lo / hi : std::ldexp(1.0, -30);
  for (int k = 1; k < samples; ++k) {
    const double x = hi * std::pow(std::max(ratio, std::ldexp(1.0, -40)),
                                   static_cast<double>(k) / (samples - 1));
    m = std::min(m, f(x));
  }
  return m;
}

}  // namespace

ConditionReport check_conditions(const ProfilePair& profile,
                                 std::vector<double> y_grid, double quad_tol,
                                 double divergence_threshold) {
  if (y_grid.empty()) throw std::invalid_argument("check_conditions: empty y grid");
  for (std::size_t k = 0; k < y_grid.size(); ++k) {
    if (!(y_grid[k] > 0 && y_grid[k] < 0.5))
      throw std::invalid_argument("check_conditions: scales must lie in (0, 1/2)");
    if (k > 0 && !(y_grid[k] < y_grid[k - 1]))
      throw std::invalid_argument("check_conditions: scales must be strictly decreasing");
  }

  const auto& V = profile.V;
  const auto& rho = profile.rho;
  ConditionReport rep;
  rep.y_grid = y_grid;
  rep.divergence_threshold = divergence_threshold;
  const double y_min = y_grid.back();

  // -- non-integrability at the two edges ------------------------------------
  // Evidence: partial integrals from y down to the fixed reference 1/2;
  // verdict from the geometric tail scan below y_min.
  for (double y : y_grid) {
    rep.nonintegrable_left.values.push_back(
        quad::integrate(V, y, 0.5, quad_tol).value);
    rep.nonintegrable_right.values.push_back(
        quad::integrate(V, 0.5, 1 - y, quad_tol).value);
  }
  {
    auto left = quad::integrate_singular_lower(V, 0, y_min, quad_tol,
                                               divergence_threshold, 320);
    auto right = quad::integrate_singular_upper(V, 1 - y_min, 1, quad_tol,
                                                divergence_threshold, 320);
    rep.nonintegrable_left.verdict = left.diverged;
    rep.nonintegrable_left.conclusive = left.diverged || left.converged;
    rep.nonintegrable_right.verdict = right.diverged;
    rep.nonintegrable_right.conclusive = right.diverged || right.converged;
  }

  // -- reciprocal growth -----------------------------------------------------
  bool v1_ok = true;
  for (double y : y_grid) {
    auto l = quad::integrate_singular_lower(
        [&](double x) { return 1.0 / V(x); }, 0, y, quad_tol, 1e12, 320);
    auto r = quad::integrate_singular_lower(
        [&](double x) { return 1.0 / V(1 - x); }, 0, y, quad_tol, 1e12, 320);
    v1_ok = v1_ok && l.converged && r.converged;
    rep.cond_v1_left_term.push_back(l.value / (y * y));
    rep.cond_v1_right_term.push_back(r.value / (y * y));
    rep.cond_v1.values.push_back((l.value + r.value) / (y * y));
  }
  {
    const auto& v = rep.cond_v1.values;
    const bool bounded =
        v.size() < 2 || (v.back() <= 1.1 * v[v.size() - 2] + 1e-12);
    rep.cond_v1.verdict = bounded && v.back() < 1e6;
    rep.cond_v1.conclusive = v1_ok;
  }

  // -- weighted reservoir deviation ------------------------------------------
  const double r0 = profile.rho_left, r1 = profile.rho_right;
  bool v2_ok = true;
  for (double y : y_grid) {
    auto l = quad::integrate_singular_lower(
        [&](double x) { const double d = rho(x) - r0; return V(x) * d * d; },
        0, y, quad_tol, 1e12, 320);
    auto r = quad::integrate_singular_upper(
        [&](double x) { const double d = rho(x) - r1; return V(x) * d * d; },
        1 - y, 1, quad_tol, 1e12, 320);
    v2_ok = v2_ok && l.converged && r.converged;
    rep.cond_v2_left.push_back(l.value);
    rep.cond_v2_right.push_back(r.value);
    rep.cond_v2.values.push_back(l.value + r.value);
  }
  {
    const auto& v = rep.cond_v2.values;
    rep.cond_v2.verdict =
        v.back() <= 0.25 * v.front() + 1e-12 || v.back() < 1e-12;
    rep.cond_v2.conclusive = v2_ok;
  }

  // -- pointwise growth (min over the two edges) -------------------------------
  for (double y : y_grid) {
    const double left = y * inf_on_interval(V, 0, y);
    const double right = y * inf_on_interval([&](double x) { return V(1 - x); }, 0, y);
    rep.cond_v3.values.push_back(std::min(left, right));
  }
  {
    const auto& v = rep.cond_v3.values;
    rep.cond_v3.verdict = v.back() > 10.0 && v.back() > 2.0 * v.front();
    rep.cond_v3.conclusive = true;
  }

  // -- rho'' spot check (tabulated profiles cannot certify Lipschitz rho') ----
  {
    const double h = 1e-4;
    double m = 0;
    for (int k = 1; k < 200; ++k) {
      const double x = 0.005 * k;
      if (x - h <= 0 || x + h >= 1) continue;
      const double d2 = (rho(x + h) - 2 * rho(x) + rho(x - h)) / (h * h);
      m = std::max(m, std::abs(d2));
    }
    rep.rho_second_derivative_max = m;
  }

  return rep;
}

LatticeProfile discretize(const ProfilePair& profile, int N) {
  if (N < 1) throw std::invalid_argument("discretize: N must be >= 1");
  LatticeProfile lat;
  lat.N = N;
  lat.V = Eigen::ArrayXd::Zero(N + 1);
  lat.rho = Eigen::ArrayXd::Zero(N + 1);
  lat.rho[0] = profile.rho_left;
  lat.rho[N] = profile.rho_right;
  for (int i = 1; i < N; ++i) {
    const double x = static_cast<double>(i) / N;
    lat.V[i] = profile.V(x);
    lat.rho[i] = profile.rho(x);
    if (!std::isfinite(lat.V[i]) || lat.V[i] < 0)
      throw std::runtime_error("discretize: potential not finite/nonnegative at interior site");
    if (!(lat.rho[i] > 0 && lat.rho[i] < 1))
      throw std::runtime_error("discretize: reservoir profile outside (0,1) at interior site");
  }
  return lat;
}

CellAverage cell_average_potential(const ProfilePair& profile, int M, int j,
                                   double quad_tol) {
  if (M < 1 || j < 0 || j >= M)
    throw std::invalid_argument("cell_average_potential: bad cell index");
  const double lo = static_cast<double>(j) / M;
  const double hi = static_cast<double>(j + 1) / M;
  const auto& V = profile.V;
  const auto& rho = profile.rho;
  CellAverage out;

  auto weighted_rho = [&](double vint, auto&& vrho_int) {
    if (vint <= 1e-300) return profile.rho(0.5 * (lo + hi));
    return vrho_int / vint;
  };

  if (j == 0) {
    auto vi = quad::integrate_singular_lower(V, lo, hi, quad_tol, 1e3, 320);
    if (vi.diverged) return {kInf, profile.rho_left};
    if (!vi.converged)
      throw std::runtime_error("cell_average_potential: inconclusive boundary cell");
    auto vr = quad::integrate_singular_lower(
        [&](double x) { return V(x) * rho(x); }, lo, hi, quad_tol, 1e12, 320);
    out.vbar = M * vi.value;
    out.rhobar = weighted_rho(vi.value, vr.value);
    return out;
  }
  if (j == M - 1) {
    auto vi = quad::integrate_singular_upper(V, lo, hi, quad_tol, 1e3, 320);
    if (vi.diverged) return {kInf, profile.rho_right};
    if (!vi.converged)
      throw std::runtime_error("cell_average_potential: inconclusive boundary cell");
    auto vr = quad::integrate_singular_upper(
        [&](double x) { return V(x) * rho(x); }, lo, hi, quad_tol, 1e12, 320);
    out.vbar = M * vi.value;
    out.rhobar = weighted_rho(vi.value, vr.value);
    return out;
  }

  auto vi = quad::integrate(V, lo, hi, quad_tol);
  if (!vi.converged)
    throw std::runtime_error("cell_average_potential: quadrature failed on interior cell");
  auto vr = quad::integrate([&](double x) { return V(x) * rho(x); }, lo, hi, quad_tol);
  out.vbar = M * vi.value;
  out.rhobar = weighted_rho(vi.value, vr.value);
  return out;
}

}  // namespace hydrolim
