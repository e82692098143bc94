#pragma once

#include <map>
#include <memory>
#include <vector>

#include <Eigen/LU>

#include "fsns/elliptic.hpp"
#include "fsns/geometry.hpp"
#include "fsns/grid.hpp"

namespace fsns {

struct DynamicsConfig {
  double eps = 0.0;
  double gravity = 9.81;
  double c0 = 0.5;             // Jacobian floor of the strip map
  double div_tol = 1e-6;       // cleaning projection threshold on the divergence L2 norm
  double cfl_wave = 0.3;       // fraction of 1 / omega_max
  double cfl_advect = 0.5;     // fraction of the advective crossing time
  double pressure_tol = 1e-12;
  int pressure_max_iter = 300;
  double viscous_tol = 1e-12;
  int viscous_max_iter = 400;
  /// Exponential modal filter exp(-filter_strength (k / nz)^filter_order) on
  /// the Chebyshev coefficients of the explicit velocity update, applied
  /// before the boundary conditions are imposed; 0 disables it.
  int filter_order = 0;
  double filter_strength = 36.0;
};

struct FlowState {
  std::vector<Field> v;  // d + 1 components on the strip grid
  SurfaceState surface;
  DiffeoFrame frame;
  double t = 0.0;
  double eps = 0.0;
};

/// Running energy balance: kinetic + potential + dissipated - initial.
struct EnergyLedger {
  bool started = false;
  double t = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  double dissipation_rate = 0.0;      // 4 eps int |S v|^2 dV at time t
  double dissipation_integral = 0.0;  // trapezoid rule in time
  double initial_total = 0.0;
  double residual = 0.0;

  double total() const { return kinetic + potential; }
  double relative_residual() const {
    return initial_total > 0.0 ? residual / initial_total : residual;
  }
};

struct StepStats {
  int pressure_iterations = 0;
  int viscous_iterations = 0;
  bool cleaned = false;
  double divergence = 0.0;
};

/// Explicit tendencies of the transformed system at one stage.
struct Tendency {
  std::vector<Field> dv;
  Field dh;
  Field qE, qNS;
};

/// Second-order IMEX (ARS 2-2-2) integrator for the transformed
/// free-surface system.
///
/// Advection, pressure and the kinematic condition are explicit; the
/// viscous term is implicit with the tangential-stress and divergence
/// conditions on the surface and free slip with no penetration at the
/// bottom. The pressure solves the Poisson problem of the stage state with
/// surface data g h + 2 eps (S n).n.
class Stepper {
 public:
  Stepper(const Grid& grid, CutoffProfile chi, double A, DynamicsConfig cfg);

  const Grid& grid() const { return grid_; }
  const DynamicsConfig& config() const { return cfg_; }
  double A() const { return A_; }

  /// Builds the frame of h and wraps the fields into a state.
  FlowState make_state(std::vector<Field> v, SurfaceState h, double t = 0.0) const;
  DiffeoFrame frame_of(const SurfaceState& h) const;

  Tendency explicit_rhs(const FlowState& s);
  /// Solves (I - c Delta^phi) u = rhs with the viscous boundary rows.
  std::vector<Field> viscous_solve(const std::vector<Field>& rhs, const DiffeoFrame& frame,
                                   double c, const std::vector<Field>* guess = nullptr);
  /// Residual form of the viscous operator, boundary rows included.
  std::vector<Field> viscous_apply(const std::vector<Field>& u, const DiffeoFrame& frame,
                                   double c) const;

  FlowState step(const FlowState& s, double dt);
  /// Collocated Delta^phi psi = f at interior nodes, psi = 0 on the surface
  /// and d_z psi = 0 at the bottom.
  Field poisson_solve(const Field& f, const DiffeoFrame& frame);
  /// Removes the divergence with v <- v - grad^phi psi.
  void project(FlowState& s);

  /// Applies the vertical modal filter to every velocity component.
  void filter(FlowState& s) const;

  double cfl_limit(const FlowState& s) const;
  const StepStats& last_stats() const { return stats_; }

 private:
  using ModeLU = std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>>;
  const ModeLU& factor(double c);
  std::vector<Field> precondition(const std::vector<Field>& r, const ModeLU& lu) const;
  const ModeLU& factor_poisson();

  const Grid& grid_;
  CutoffProfile chi_;
  double A_;
  DynamicsConfig cfg_;
  EllipticSolver pressure_;
  std::map<double, ModeLU> lu_cache_;
  ModeLU poisson_lu_;
  RowMatrix filter_;  // nodal-to-nodal, empty when disabled
  StepStats stats_;
};

/// Laplacian sum_i d_i^phi d_i^phi f.
Field laplacian_phi(const Field& f, const DiffeoFrame& frame, const Grid& grid);

/// int |v|^2 dV with dV = J dy dz.
double kinetic_energy(const std::vector<Field>& v, const DiffeoFrame& frame, const Grid& grid);
double potential_energy(const SurfaceState& h, const Grid& grid, double gravity);
/// 4 eps int |S^phi v|^2 dV.
double dissipation_rate(const std::vector<Field>& v, const DiffeoFrame& frame, const Grid& grid,
                        double eps);

/// Advances the ledger to the state's time; the first call fixes the
/// initial total.
EnergyLedger energy_audit(const FlowState& s, const EnergyLedger& ledger, const Grid& grid,
                          double gravity);

/// L2 norm of the transformed divergence.
double divergence_residual(const FlowState& s, const Grid& grid);

/// Throws BreakdownError on the first non-finite value.
void check_finite(const FlowState& s, const Grid& grid);

/// Surface a cos(k y) at rest (first horizontal direction).
FlowState standing_wave(const Stepper& st, double amplitude, double k);

}  // namespace fsns
