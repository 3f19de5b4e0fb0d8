#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "hydrolim/microsim.hpp"

namespace hydrolim {

// Space-time empirical density: triangular block averages on the interior
// band i = K..N-K, piecewise constant on cells [i/N - 1/2N, i/N + 1/2N).
struct EmpiricalField {
  int N = 0;
  int K = 0;
  std::vector<double> times;
  Eigen::MatrixXd values;  // one row per time, one column per band cell

  int cells() const { return N - 2 * K + 1; }
  double cell_center(int col) const { return static_cast<double>(K + col) / N; }
  double dx() const { return 1.0 / N; }
};

// Triangular-kernel block average with weights (K-|j|)/K^2, |j| < K; the
// weights sum to one exactly. Valid for K <= i <= N-K.
double block_average(const Configuration& c, int i, int K);

// <pi^N, psi> = N^{-1} sum_i eta_i psi(i/N), an exact finite sum.
double empirical_pairing(const Configuration& c,
                         const std::function<double(double)>& psi);

// Triangular smoothing of an arbitrary 0/1 sequence a[0..len-1] in O(len)
// integer arithmetic via a double prefix sum (the triangular kernel is a box
// convolved with a box). Returns one value per admissible center
// i = K-1 .. len-K.
Eigen::ArrayXd triangular_average(const std::uint8_t* a, int len, int K);

// Block averages for a whole snapshot; returns values for i = K..N-K.
Eigen::ArrayXd block_average_row(const Configuration& c, int K);

EmpiricalField empirical_density_field(const Trajectory& traj, int K);

enum class Edge { Left, Right };

struct BoundaryAverage {
  double value = 0;        // integral over [0,t] of the block density
  bool density_ok = true;  // snapshot spacing satisfied the stated bound
  double max_spacing = 0;
};

// Time integral (trapezoid over snapshots) of the mean occupation over the
// first floor(y*N)+1 sites (mirrored for the right edge). The harness
// compares it against t * rho(0). inf_V, when positive, is the infimum of V
// over the boundary strip and drives the snapshot-density check
// spacing <= (y/4) / inf_V; violations are flagged, the estimate returned.
BoundaryAverage boundary_block_time_average(const Trajectory& traj, double y,
                                            double t, Edge edge = Edge::Left,
                                            double inf_V = 0);

}  // namespace hydrolim
