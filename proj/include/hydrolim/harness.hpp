#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hydrolim/diagnostics.hpp"
#include "hydrolim/microsim.hpp"
#include "hydrolim/profiles.hpp"

namespace hydrolim {

struct ExperimentConfig {
  // profile block
  std::string family = "power";  // power | constant | tabulated
  double gamma = 1.0;
  double rho0 = 0.2, rho1 = 0.8;
  double const_v = 0.0, const_rho = 0.5;
  std::string v_table, rho_table;

  double p = 1.0;
  std::vector<int> N_list{256, 512, 1024, 2048};
  double sigma_exponent = 2.0 / 3.0;
  double K_exponent = 0.61;
  double sigma_override = 0;  // 0 means "use the exponent default"
  int K_override = 0;
  BoundaryRates bd;

  // initial data: constant | step | rho
  std::string u0_kind = "constant";
  double u0_value = 0.5;
  double u0_left = 0.8, u0_right = 0.2, u0_x0 = 0.5;

  double T = 0.5;
  std::vector<double> obs_times{0.1, 0.25, 0.5};
  int ensemble = 50;
  int M = 8192;
  double cfl = 0.9;
  std::uint64_t seed = 20240801;
  int threads = 0;  // 0 = hardware concurrency
  std::string out_dir;

  // boundary experiments
  std::vector<double> y_grid{0.1, 0.05, 0.025};
  int boundary_ensemble = 16;
  double pinning_tol = 0.03;  // |avg - t rho(0)| < tol * t at the smallest y
  int insensitivity_ensemble = 160;
  int insensitivity_obs = 17;  // uniform times on [0.2 T, T]
  std::vector<double> alt_rates{5.0, 0.1, 0.1, 5.0};

  // condition audit
  std::vector<double> condition_scales;  // empty -> default dyadic grid
  double quad_tol = 1e-8;
  double divergence_threshold = 1e3;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::string& path);
nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);

ProfilePair profile_from_config(const ExperimentConfig& cfg);
std::function<double(double)> u0_from_config(const ExperimentConfig& cfg);
ScalingScheme scheme_from_config(const ExperimentConfig& cfg, int N);
std::string resolve_out_dir(const ExperimentConfig& cfg);

// Runs fn(0..jobs-1) on a small pool; results must be written to
// pre-assigned slots so the outcome is independent of scheduling.
void parallel_for(int jobs, int threads, const std::function<void(int)>& fn);

// Ensemble mean of the empirical density field (and total event count).
struct EnsembleField {
  GridField mean;
  Eigen::MatrixXd stderr_cells;  // per (time, cell) standard error of the mean
  std::uint64_t events = 0;
};
EnsembleField ensemble_mean_field(const ExperimentConfig& cfg, int N,
                                  const BoundaryRates& bd,
                                  const std::vector<double>& obs,
                                  std::uint64_t seed_tag);

// ---------------------------------------------------------------------------

struct SweepRow {
  int N = 0;
  double sigma = 0;
  int K = 0;
  bool ok = false;
  std::string error;
  std::vector<double> l1_times;
  double l1_avg = 0;
  double mc_se = 0;  // average per-cell standard error of the ensemble mean
  std::uint64_t events = 0;
};

struct SweepReport {
  nlohmann::ordered_json config_echo;
  std::vector<SweepRow> rows;
  bool monotone_decreasing = false;
  double last_over_first = 0;
  bool pass = false;  // monotone and last < 0.5 * first
  GridField reference;
  std::vector<GridField> mean_fields;  // aligned with rows (empty on failure)
};

SweepReport run_convergence_sweep(const ExperimentConfig& cfg);

struct BoundaryPinningRow {
  double y = 0;
  double left_avg = 0, right_avg = 0;
  double left_dev = 0, right_dev = 0;  // |avg - T rho(edge)|
  bool density_ok = true;
};

struct InsensitivityRow {
  int N = 0;
  double gap = 0;
};

struct BoundaryReport {
  nlohmann::ordered_json config_echo;
  double t_horizon = 0;
  double rho_left = 0, rho_right = 0;
  std::vector<BoundaryPinningRow> pinning;
  bool pinning_decreasing = false;
  bool pinning_small = false;
  bool cond_v3_verdict = false;  // recorded, not gating
  std::vector<InsensitivityRow> insensitivity;
  bool insensitivity_pass = false;
  bool pass = false;
};

BoundaryReport run_boundary_experiments(const ExperimentConfig& cfg);

struct OracleRow {
  int N = 0;
  double p = 1;
  double t = 0;
  double max_abs_z = 0;
  bool pass = false;
};

struct OracleReport {
  nlohmann::ordered_json config_echo;
  int ensemble = 0;
  double z_limit = 4.0;
  std::vector<OracleRow> rows;
  bool pass = false;
  double seconds = 0;
};

// Ensemble means against uniformization marginals over a (N, p, t) grid.
OracleReport run_oracle_validation(const ExperimentConfig& cfg,
                                   const std::vector<int>& N_values,
                                   const std::vector<double>& p_values,
                                   const std::vector<double>& t_values,
                                   int ensemble);

// ---------------------------------------------------------------------------

std::vector<std::string> emit_sweep_outputs(const SweepReport& rep, const std::string& dir);
std::vector<std::string> emit_boundary_outputs(const BoundaryReport& rep, const std::string& dir);
std::vector<std::string> emit_oracle_outputs(const OracleReport& rep, const std::string& dir);

nlohmann::ordered_json condition_report_to_json(const ConditionReport& rep);

}  // namespace hydrolim
