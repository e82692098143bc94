#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fsns/config.hpp"
#include "fsns/diagnostics.hpp"
#include "fsns/dynamics.hpp"

namespace fsns {

/// Process exit codes of the lab front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitBreakdown = 3,
  kExitAssertion = 4,
};

GridSpec grid_spec(const RunConfig& cfg);
DynamicsConfig dynamics_config(const RunConfig& cfg, double eps);
CutoffProfile cutoff(const RunConfig& cfg);

/// Initial surface: a cos(k y) plus seeded noise on the modes 2..5.
Field initial_surface(const RunConfig& cfg, const Grid& grid);
/// Strip stretch A of the initial state (from the checkpoint if one is set).
double initial_A(const RunConfig& cfg, const Grid& grid);
/// Initial state: at rest, or with a projected vortical shear when the
/// config is not irrotational; loaded from init.checkpoint if given.
FlowState initial_state(const RunConfig& cfg, Stepper& stepper);

/// Time step: cfg.dt if positive, else cfl * the limit of the initial
/// state, shrunk so that an integer number of steps reaches T.
struct TimeGrid {
  double dt = 0.0;
  int steps = 0;
};
TimeGrid time_grid(const RunConfig& cfg, double dt_limit, double t0 = 0.0);

/// Per-step solver report, one row per accepted step.
struct StepRow {
  int step = 0;
  double t = 0.0, dt = 0.0;
  int pressure_iterations = 0, viscous_iterations = 0;
  bool cleaned = false;
  double divergence = 0.0;
  std::optional<double> bc_residual;  // only on monitored steps
};

struct RunResult {
  double eps = 0.0;
  bool completed = false;
  std::string failure;  // empty on success
  int exit_code = kExitOk;
  int steps_taken = 0;
  double dt = 0.0;
  std::vector<MonitorRow> rows;
  std::vector<StepRow> steps;
  std::vector<FlowState> snapshots;  // at monitored steps
  FlowState final_state;
  EnergyLedger ledger;
  int violations = 0;  // boundary or divergence residual above tolerance
};

struct RunOptions {
  std::string out_dir;  // empty: no files written
  double dt = 0.0;      // forced step; 0 uses time_grid
  const std::vector<FlowState>* reference = nullptr;  // eps = 0 run at matched steps
  bool keep_snapshots = false;
};

/// Advances one configuration to T. Breakdown halts the run with the step
/// index in `failure` and exit code 3; rows up to the failure are kept and
/// written.
RunResult run_single(const RunConfig& cfg, double eps, const RunOptions& opt = {});

struct SweepMember {
  double eps = 0.0;
  bool completed = false;
  std::string failure;
  double l2_distance = 0.0;        // ||v_eps(T) - v_0(T)||
  double linf_interior = 0.0;      // below the 4 sqrt(eps) band
  double h_distance = 0.0;         // |h_eps(T) - h_0(T)|_inf
  double sup_l2_distance = 0.0;    // over matched times
  double sup_linf_interior = 0.0;
  double max_Qm = 0.0;
  double min_taylor = 0.0;
  double energy_residual = 0.0;    // final relative residual
  std::optional<double> layer_width;
  double dzv_l4 = 0.0;             // (int ||d_z v||_{m-1}^4 dt)^(1/4)
};

struct SweepReport {
  double dt = 0.0;
  int steps = 0;
  bool partial = false;
  std::vector<SweepMember> members;  // eps > 0, in config order
  SweepMember reference;
  // Cross-eps summaries.
  bool l2_decreasing = false;
  bool linf_decreasing = false;
  double l2_reduction = 0.0;   // distance at the smallest eps over the largest
  double qm_ratio = 0.0;       // max over eps of max_Qm over the largest eps value
  double min_taylor = 0.0;
  std::optional<double> layer_ratio_2_3;  // width(1e-2) / width(1e-3) when both present
};

/// Runs the eps = 0 reference, then all eps > 0 members concurrently at the
/// common dt; writes per-member run directories plus sweep.csv and
/// distances.csv under the output directory.
SweepReport run_sweep(const RunConfig& cfg, const std::string& out_dir);

struct KernelFamilyResult {
  std::string family;
  bool passed = false;
  std::string detail;
};

/// Executes the heat, fp, symmetrizer and Hardy families and writes one CSV
/// per family. DomainError from the heat family propagates.
std::vector<KernelFamilyResult> run_kernels(const RunConfig& cfg, const std::string& out_dir);

/// Monitor row of the initial state for each eps, written to norms.csv.
std::vector<MonitorRow> run_norms(const RunConfig& cfg, const std::string& out_dir);

}  // namespace fsns
