#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "fsns/geometry.hpp"
#include "fsns/grid.hpp"

namespace fsns {

enum class BottomCondition { dirichlet_zero, neumann_zero };

/// -div(E grad rho) = div F  or  = f, with rho = g on z = 0.
struct EllipticProblem {
  const DiffeoFrame* frame = nullptr;  // supplies E and the flat-frame A
  std::optional<std::vector<Field>> rhs_divergence;
  std::optional<Field> rhs_plain;
  Field top_data;  // nh values; empty means zero
  BottomCondition bottom = BottomCondition::dirichlet_zero;
};

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;
};

struct EllipticSolution {
  Field rho;
  SolveReport report;
};

/// Galerkin form of -div(E grad .) on the polynomial space of the grid:
/// K = G^T Q^T (W E_q) Q G, where Q interpolates to a Gauss-Legendre grid
/// fine enough to integrate the products exactly. K is symmetric to
/// rounding. Rows of Dirichlet levels are removed; the bottom Neumann
/// condition is natural.
class EllipticSolver {
 public:
  EllipticSolver(const Grid& grid, double A, BottomCondition bottom, Exec ex = Exec::parallel);

  const Grid& grid() const { return grid_; }
  BottomCondition bottom() const { return bottom_; }
  double A() const { return A_; }

  /// K u for a full field (no boundary rows removed).
  Field apply(const DiffeoFrame& frame, const Field& u) const;
  /// E sampled on the quadrature levels, row-major nc x nc.
  std::vector<Field> quadrature_coefficients(const DiffeoFrame& frame) const;
  Field apply_q(const std::vector<Field>& eq, const Field& u) const;
  /// Weak load of a plain right-hand side, int f w.
  Field load(const Field& f) const;
  /// Weak load of div F, -int F . grad w.
  Field load_divergence(const std::vector<Field>& F) const;
  /// Inverse of the flat-frame operator on the free levels; constrained
  /// levels of the result are zero.
  Field precondition(const Field& r) const;
  /// True where the level is eliminated by a Dirichlet condition.
  bool constrained(int level) const;

  EllipticSolution solve(const EllipticProblem& p, double tol, int max_iter,
                         const Field* guess = nullptr) const;

 private:
  const Grid& grid_;
  double A_;
  BottomCondition bottom_;
  Exec exec_;
  int first_, last_;  // free level range [first_, last_]
  RowMatrix q_, qt_;
  std::vector<double> wq_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> chol_;
};

EllipticSolution solve_dirichlet(const EllipticProblem& p, const Grid& grid, double tol,
                                 int max_iter);

/// d_j^phi v_i stored at index i * nc + j.
std::vector<Field> velocity_gradient(const std::vector<Field>& v, const DiffeoFrame& frame,
                                     const Grid& grid);
/// Symmetric part of a velocity gradient.
std::vector<Field> strain(const std::vector<Field>& grad, int nc);
/// (S n) . n on the surface level.
Field normal_stress_top(const std::vector<Field>& strain, const DiffeoFrame& frame,
                        const Grid& grid);

struct PressurePair {
  Field qE, qNS;
  Field taylor_coeff;  // g - d_z^phi qE on z = 0
  SolveReport reportE, reportNS;
};

struct PressureOptions {
  double gravity = 9.81;
  double tol = 1e-12;
  int max_iter = 200;
  BottomCondition bottom = BottomCondition::dirichlet_zero;
};

/// J tr(grad^phi v grad^phi v): the Euler pressure source.
Field euler_pressure_source(const std::vector<Field>& grad, const DiffeoFrame& frame, int nc);

Field pressure_euler(const std::vector<Field>& v, const SurfaceState& h,
                     const DiffeoFrame& frame, const Grid& grid, const PressureOptions& opt,
                     Field* taylor_coeff = nullptr, SolveReport* report = nullptr);

Field pressure_ns(const std::vector<Field>& v, const DiffeoFrame& frame, const Grid& grid,
                  double eps, const PressureOptions& opt, SolveReport* report = nullptr);

PressurePair pressure_pair(const std::vector<Field>& v, const SurfaceState& h,
                           const DiffeoFrame& frame, const Grid& grid, double eps,
                           const PressureOptions& opt);

/// g - (1/J) d_z q on the surface, using the collocation boundary row.
Field taylor_coefficient(const Field& qE, const DiffeoFrame& frame, const Grid& grid,
                         double gravity);

}  // namespace fsns
