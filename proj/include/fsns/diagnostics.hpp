#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fsns/dynamics.hpp"
#include "fsns/function_spaces.hpp"

namespace fsns {

/// V^alpha = Z^alpha v - d_z^phi v Z^alpha eta for all |alpha| <= m.
struct GoodUnknown {
  std::vector<ConormalMultiIndex> alpha;
  std::vector<std::vector<Field>> V;  // V[k][component]
};

GoodUnknown good_unknown(const FlowState& s, int m, const Grid& grid);
/// (sum_alpha ||V^alpha||^2)^(1/2) with the flat measure.
double good_unknown_norm(const GoodUnknown& g, const Grid& grid);

/// Pi S^phi v n with Pi = Id - n (x) n, on the whole strip.
std::vector<Field> s_n(const FlowState& s, const Grid& grid);
/// Largest absolute value of a vector field on the surface level.
double surface_max(const std::vector<Field>& f, const Grid& grid);

struct Vorticity {
  std::vector<Field> omega;  // one component for d = 1, three for d = 2
  /// d_z v . N + d_z phi sum_a d_a v_a, which vanishes for divergence-free v.
  Field identity_residual;
};
Vorticity vorticity(const FlowState& s, const Grid& grid);

/// min over the surface of g - d_z^phi q^E.
double taylor_min(const FlowState& s, const Grid& grid, double gravity);
std::vector<double> taylor_series(const std::vector<FlowState>& states, const Grid& grid,
                                  double gravity);

/// Depth where the horizontally averaged |d_z (v_eps - v_0)| of the
/// horizontal components first falls to 1/e of its surface value, with
/// log-linear interpolation between levels. Empty if no layer is detected.
std::optional<double> layer_width(const FlowState& v_eps, const FlowState& v_0, const Grid& grid);

struct MonitorOptions {
  int m = 4;
  double gravity = 9.81;
};

/// One row of the monitor CSV; norms are unsquared.
struct MonitorRow {
  double t = 0.0, eps = 0.0;
  double Qm_total = 0.0;
  double Vm_norm = 0.0;
  double h_m = 0.0;
  double sqrt_eps_h_mhalf = 0.0;
  double Sn_m2 = 0.0;
  double Sn_1inf = 0.0;
  double sqrt_eps_dzSn_inf = 0.0;
  double taylor_min = 0.0;
  double energy_residual = 0.0;
  double div_residual = 0.0;
  std::optional<double> layer_width;
  double dzv_m1 = 0.0;  // ||d_z v||_{m-1}, for the L4-in-time record
};

/// Q_m = |h|_m^2 + eps |h|_{m+1/2}^2 + ||V^m||^2 + ||S_n||_{m-2}^2
///       + ||S_n||_{1,inf}^2 + eps ||d_z S_n||_inf^2.
MonitorRow monitor(const FlowState& s, const Grid& grid, const MonitorOptions& opt,
                   const EnergyLedger& ledger, const FlowState* reference = nullptr);

std::string monitor_csv_header();
std::string monitor_csv_row(const MonitorRow& r);

}  // namespace fsns
