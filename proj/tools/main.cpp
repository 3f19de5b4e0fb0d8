// Command-line front end: profile audits, single trajectories, PDE solves,
// convergence sweeps, boundary experiments and small-system oracle checks.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hydrolim/harness.hpp"
#include "hydrolim/io.hpp"
#include "hydrolim/oracle.hpp"
#include "hydrolim/pde.hpp"

using namespace hydrolim;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  double gamma = -1, rho0 = -1, rho1 = -1, p = -1, T = -1;
  std::vector<int> N_list;
  int ensemble = -1, M = -1, threads = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--out", o.out_dir, "output directory (default $HYDROLIM_OUT or ./out)");
  cmd->add_option("--gamma", o.gamma, "power-family exponent");
  cmd->add_option("--rho0", o.rho0, "left reservoir density");
  cmd->add_option("--rho1", o.rho1, "right reservoir density");
  cmd->add_option("--p", o.p, "asymmetry in [1/2, 1]");
  cmd->add_option("--T", o.T, "time horizon");
  cmd->add_option("--N", o.N_list, "lattice sizes");
  cmd->add_option("--ensemble", o.ensemble, "trajectories per lattice size");
  cmd->add_option("--M", o.M, "PDE reference grid size");
  cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)");
  cmd->add_option("--seed", o.seed, "master seed")->each([&o](const std::string&) { o.seed_set = true; });
}

ExperimentConfig build_config(const CommonOpts& o) {
  ExperimentConfig cfg;
  if (!o.config_path.empty()) cfg = load_config_file(o.config_path);
  if (o.gamma > 0) cfg.gamma = o.gamma;
  if (o.rho0 > 0) cfg.rho0 = o.rho0;
  if (o.rho1 > 0) cfg.rho1 = o.rho1;
  if (o.p > 0) cfg.p = o.p;
  if (o.T > 0) {
    cfg.T = o.T;
    cfg.obs_times = {0.2 * o.T, 0.5 * o.T, o.T};
  }
  if (!o.N_list.empty()) cfg.N_list = o.N_list;
  if (o.ensemble > 0) cfg.ensemble = o.ensemble;
  if (o.M > 0) cfg.M = o.M;
  if (o.threads >= 0) cfg.threads = o.threads;
  if (o.seed_set) cfg.seed = o.seed;
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  return cfg;
}

int cmd_check_profile(const ExperimentConfig& cfg) {
  const ProfilePair profile = profile_from_config(cfg);
  std::vector<double> scales = cfg.condition_scales;
  if (scales.empty())
    for (int k = 0; k < 12; ++k) scales.push_back(0.2 * std::ldexp(1.0, -k));
  const ConditionReport rep =
      check_conditions(profile, scales, cfg.quad_tol, cfg.divergence_threshold);
  const auto j = condition_report_to_json(rep);
  const std::string dir = resolve_out_dir(cfg);
  io::ensure_directory(dir);
  io::write_text_file(dir + "/conditions.json", j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  const bool conclusive = rep.nonintegrable_left.conclusive &&
                          rep.nonintegrable_right.conclusive &&
                          rep.cond_v1.conclusive && rep.cond_v2.conclusive;
  std::printf("nonintegrable: L=%d R=%d  v1=%d v2=%d v3=%d  (conclusive=%d)\n",
              rep.nonintegrable_left.verdict, rep.nonintegrable_right.verdict,
              rep.cond_v1.verdict, rep.cond_v2.verdict, rep.cond_v3.verdict,
              conclusive);
  return conclusive ? 0 : 1;
}

int cmd_simulate(const ExperimentConfig& cfg, int snapshots) {
  const ProfilePair profile = profile_from_config(cfg);
  const int N = cfg.N_list.front();
  ScalingScheme scheme = scheme_from_config(cfg, N);
  const LatticeProfile lattice = discretize(profile, N);
  Rng init_rng(derive_seed(cfg.seed, 101, N, 0));
  Configuration c0 = sample_initial(u0_from_config(cfg), N, init_rng);
  std::vector<double> obs(snapshots);
  for (int i = 0; i < snapshots; ++i)
    obs[i] = cfg.T * i / std::max(1, snapshots - 1);
  const Trajectory traj =
      simulate(std::move(c0), scheme, lattice, obs, derive_seed(cfg.seed, 101, N, 1));
  const std::string dir = resolve_out_dir(cfg);
  io::ensure_directory(dir);
  const std::string path = dir + "/trajectory_N" + std::to_string(N) + ".rle";
  io::write_text_file(path, io::trajectory_rle(traj));
  std::printf("wrote %s (%llu events)\n", path.c_str(),
              static_cast<unsigned long long>(traj.counters.total()));
  return 0;
}

int cmd_solve(const ExperimentConfig& cfg) {
  const ProfilePair profile = profile_from_config(cfg);
  const SolveResult sol =
      solve(u0_from_config(cfg), profile, cfg.p, cfg.M, cfg.cfl, cfg.obs_times);
  const std::string dir = resolve_out_dir(cfg);
  io::ensure_directory(dir);
  const std::string path = dir + "/solution.csv";
  io::write_text_file(path, io::field_csv(to_grid(sol), {{"grid", "pde"},
                                                         {"M", std::to_string(cfg.M)}}));
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  const SweepReport rep = run_convergence_sweep(cfg);
  const auto files = emit_sweep_outputs(rep, resolve_out_dir(cfg));
  for (const auto& r : rep.rows) {
    if (r.ok)
      std::printf("N=%5d  sigma=%6.0f K=%4d  L1=%.6f  events=%llu\n", r.N, r.sigma,
                  r.K, r.l1_avg, static_cast<unsigned long long>(r.events));
    else
      std::printf("N=%5d  FAILED: %s\n", r.N, r.error.c_str());
  }
  std::printf("monotone=%d last/first=%.3f pass=%d\n", rep.monotone_decreasing,
              rep.last_over_first, rep.pass);
  for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
  return rep.pass ? 0 : 1;
}

int cmd_boundary(const ExperimentConfig& cfg) {
  const BoundaryReport rep = run_boundary_experiments(cfg);
  const auto files = emit_boundary_outputs(rep, resolve_out_dir(cfg));
  for (const auto& r : rep.pinning)
    std::printf("y=%.4f  left_dev=%.5f right_dev=%.5f%s\n", r.y, r.left_dev,
                r.right_dev, r.density_ok ? "" : "  [sparse snapshots]");
  for (const auto& r : rep.insensitivity)
    std::printf("insensitivity N=%5d gap=%.6f\n", r.N, r.gap);
  std::printf("pinning_decreasing=%d pinning_small=%d insensitivity=%d pass=%d\n",
              rep.pinning_decreasing, rep.pinning_small, rep.insensitivity_pass,
              rep.pass);
  for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
  return rep.pass ? 0 : 1;
}

int cmd_oracle(const ExperimentConfig& cfg, std::vector<int> Ns,
               std::vector<double> ps, std::vector<double> ts, int m) {
  if (Ns.empty()) Ns = {2, 3, 4, 5, 6};
  if (ps.empty()) ps = {1.0, 0.75};
  if (ts.empty()) ts = {0.1, 0.5};
  const OracleReport rep = run_oracle_validation(cfg, Ns, ps, ts, m);
  const auto files = emit_oracle_outputs(rep, resolve_out_dir(cfg));
  for (const auto& r : rep.rows)
    std::printf("N=%d p=%.2f t=%.2f  max|z|=%.3f  %s\n", r.N, r.p, r.t, r.max_abs_z,
                r.pass ? "ok" : "FAIL");
  std::printf("pass=%d (%.1fs, m=%d)\n", rep.pass, rep.seconds, rep.ensemble);
  for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
  return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"open ASEP with boundary-diverging relaxation: simulator, entropy solver and verification harness"};
  app.require_subcommand(1);

  CommonOpts o;
  auto* c_check = app.add_subcommand("check-profile", "audit the potential/reservoir conditions");
  add_common(c_check, o);
  auto* c_sim = app.add_subcommand("simulate", "run one trajectory and dump RLE snapshots");
  add_common(c_sim, o);
  int snapshots = 11;
  c_sim->add_option("--snapshots", snapshots, "number of observation times");
  auto* c_solve = app.add_subcommand("solve", "finite-volume entropy solve");
  add_common(c_solve, o);
  auto* c_sweep = app.add_subcommand("sweep", "convergence sweep over N");
  add_common(c_sweep, o);
  auto* c_bd = app.add_subcommand("boundary", "boundary pinning and rate-insensitivity experiments");
  add_common(c_bd, o);
  auto* c_or = app.add_subcommand("oracle-validate", "small-N marginals vs uniformization");
  add_common(c_or, o);
  std::vector<int> or_N;
  std::vector<double> or_p, or_t;
  int or_m = 10000;
  c_or->add_option("--oracle-N", or_N, "lattice sizes (<= 8)");
  c_or->add_option("--oracle-p", or_p, "asymmetry values");
  c_or->add_option("--oracle-t", or_t, "observation times");
  c_or->add_option("--oracle-ensemble", or_m, "trajectories per case");

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = build_config(o);
    if (c_check->parsed()) return cmd_check_profile(cfg);
    if (c_sim->parsed()) return cmd_simulate(cfg, snapshots);
    if (c_solve->parsed()) return cmd_solve(cfg);
    if (c_sweep->parsed()) return cmd_sweep(cfg);
    if (c_bd->parsed()) return cmd_boundary(cfg);
    if (c_or->parsed()) return cmd_oracle(cfg, or_N, or_p, or_t, or_m);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
