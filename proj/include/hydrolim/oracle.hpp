#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <vector>

#include "hydrolim/microsim.hpp"

namespace hydrolim {
namespace oracle {

// Full generator on the 2^(N+1) configuration space, N <= 8. The channel
// pricing here is written out directly from the generator definition and must
// not share code with the simulator: agreement of the two is itself a check.
struct GeneratorMatrix {
  int N = 0;
  int dim = 0;
  Eigen::SparseMatrix<double, Eigen::RowMajor> Q;  // row sums are zero
  double max_exit = 0;                             // uniformization constant
};

GeneratorMatrix build_generator(const ScalingScheme& scheme,
                                const LatticeProfile& lattice);

// Occupancy bit i of a state index corresponds to site i.
inline int state_bit(int state, int site) { return (state >> site) & 1; }

// Product distribution with the given per-site occupation probabilities.
Eigen::VectorXd product_distribution(const Eigen::ArrayXd& probs);

// Transient distribution at time t by uniformization, Poisson tail below
// tail_tol. Large rate*time products are split recursively to keep the
// Poisson weights representable.
Eigen::VectorXd distribution_at(const GeneratorMatrix& gen,
                                const Eigen::VectorXd& init, double t,
                                double tail_tol = 1e-12);

// Per-site occupation probabilities of a distribution.
Eigen::VectorXd site_marginals(const GeneratorMatrix& gen,
                               const Eigen::VectorXd& dist);

// Exact marginals at time t from a product initial law.
Eigen::VectorXd marginal_evolution(const GeneratorMatrix& gen,
                                   const Eigen::VectorXd& init, double t,
                                   double tail_tol = 1e-12);

// Per-site z-scores of ensemble means against exact marginals, with the
// degenerate convention z = 0 when the exact marginal is 0 or 1 and the
// empirical mean matches it exactly.
struct ZReport {
  Eigen::ArrayXd z;
  double max_abs = 0;
  int ensemble = 0;
};

ZReport compare_marginals(const Eigen::ArrayXd& empirical_mean,
                          const Eigen::VectorXd& exact, int ensemble);

}  // namespace oracle
}  // namespace hydrolim
