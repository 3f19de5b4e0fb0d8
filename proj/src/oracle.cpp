#include "hydrolim/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace hydrolim {
namespace oracle {

GeneratorMatrix build_generator(const ScalingScheme& scheme,
                                const LatticeProfile& lattice) {
  const int N = scheme.N;
  if (N > 8) throw std::invalid_argument("oracle: N <= 8 required (state space 2^(N+1))");
  if (lattice.N != N) throw std::invalid_argument("oracle: lattice size mismatch");
  GeneratorMatrix gen;
  gen.N = N;
  gen.dim = 1 << (N + 1);

  const double p = scheme.p;
  const double half_sigma = 0.5 * scheme.sigma;
  const double n = N;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(gen.dim) * (2 * N + 2));
  double max_exit = 0;
  for (int s = 0; s < gen.dim; ++s) {
    double exit = 0, comp = 0;  // compensated row sum
    auto push = [&](int target, double rate) {
      if (rate <= 0) return;
      trip.emplace_back(s, target, rate);
      const double y = rate - comp;
      const double t = exit + y;
      comp = (t - exit) - y;
      exit = t;
    };
    // exclusion channels, accelerated by N
    for (int i = 0; i < N; ++i) {
      const int bi = state_bit(s, i), bj = state_bit(s, i + 1);
      if (bi == bj) continue;
      const double c = bi == 1 ? p : 1 - p;  // p eta_i(1-eta_{i+1}) + (1-p) eta_{i+1}(1-eta_i)
      push(s ^ ((1 << i) | (1 << (i + 1))), n * (c + half_sigma));
    }
    // interior relaxation: N * (1/N) * V_i [rho_i (1-eta_i) + (1-rho_i) eta_i]
    for (int i = 1; i < N; ++i) {
      const double rate = state_bit(s, i) ? lattice.V[i] * (1 - lattice.rho[i])
                                          : lattice.V[i] * lattice.rho[i];
      push(s ^ (1 << i), rate);
    }
    // reservoirs at sites 0 and N, accelerated by N
    push(s ^ 1, n * (state_bit(s, 0) ? scheme.bd.out_l : scheme.bd.in_l));
    push(s ^ (1 << N), n * (state_bit(s, N) ? scheme.bd.out_r : scheme.bd.in_r));

    trip.emplace_back(s, s, -exit);
    max_exit = std::max(max_exit, exit);
  }
  gen.Q.resize(gen.dim, gen.dim);
  gen.Q.setFromTriplets(trip.begin(), trip.end());
  gen.max_exit = max_exit;
  return gen;
}

Eigen::VectorXd product_distribution(const Eigen::ArrayXd& probs) {
  const int sites = static_cast<int>(probs.size());
  const int dim = 1 << sites;
  Eigen::VectorXd dist(dim);
  for (int s = 0; s < dim; ++s) {
    double w = 1;
    for (int i = 0; i < sites; ++i)
      w *= state_bit(s, i) ? probs[i] : 1 - probs[i];
    dist[s] = w;
  }
  return dist;
}

Eigen::VectorXd distribution_at(const GeneratorMatrix& gen,
                                const Eigen::VectorXd& init, double t,
                                double tail_tol) {
  if (t < 0) throw std::invalid_argument("distribution_at: t must be >= 0");
  if (init.size() != gen.dim) throw std::invalid_argument("distribution_at: size mismatch");
  const double lam = gen.max_exit;
  if (t == 0 || lam == 0) return init;
  const double a = lam * t;
  if (a > 500) {  // keep exp(-a) representable
    Eigen::VectorXd half = distribution_at(gen, init, 0.5 * t, tail_tol);
    return distribution_at(gen, half, 0.5 * t, tail_tol);
  }

  const Eigen::SparseMatrix<double> Qt = gen.Q.transpose();
  Eigen::VectorXd w = init;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(gen.dim);
  double pois = std::exp(-a);
  double cum = 0;
  const int k_max = static_cast<int>(a + 30 * std::sqrt(a + 1) + 64);
  for (int k = 0; k <= k_max; ++k) {
    if (k > 0) {
      w += (Qt * w) / lam;  // w_k = w_{k-1} (I + Q/lam) as a column action
      pois *= a / k;
    }
    acc += pois * w;
    cum += pois;
    if (1 - cum < tail_tol) break;
  }
  // compensate the truncated Poisson tail so acc stays a probability vector
  return acc / cum;
}

Eigen::VectorXd site_marginals(const GeneratorMatrix& gen,
                               const Eigen::VectorXd& dist) {
  Eigen::VectorXd marg = Eigen::VectorXd::Zero(gen.N + 1);
  for (int s = 0; s < gen.dim; ++s) {
    const double w = dist[s];
    if (w == 0) continue;
    for (int i = 0; i <= gen.N; ++i)
      if (state_bit(s, i)) marg[i] += w;
  }
  return marg;
}

Eigen::VectorXd marginal_evolution(const GeneratorMatrix& gen,
                                   const Eigen::VectorXd& init, double t,
                                   double tail_tol) {
  return site_marginals(gen, distribution_at(gen, init, t, tail_tol));
}

ZReport compare_marginals(const Eigen::ArrayXd& empirical_mean,
                          const Eigen::VectorXd& exact, int ensemble) {
  if (empirical_mean.size() != exact.size())
    throw std::invalid_argument("compare_marginals: size mismatch");
  ZReport rep;
  rep.ensemble = ensemble;
  rep.z.resize(exact.size());
  for (Eigen::Index i = 0; i < exact.size(); ++i) {
    const double pr = exact[i];
    const double se = std::sqrt(pr * (1 - pr) / ensemble);
    if (se == 0) {
      rep.z[i] = empirical_mean[i] == pr ? 0 : kInf;
    } else {
      rep.z[i] = (empirical_mean[i] - pr) / se;
    }
    rep.max_abs = std::max(rep.max_abs, std::abs(rep.z[i]));
  }
  return rep;
}

}  // namespace oracle
}  // namespace hydrolim
