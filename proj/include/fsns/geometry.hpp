#pragma once

#include <functional>

#include "fsns/grid.hpp"

namespace fsns {

/// Free-surface elevation on the periodic horizontal grid.
struct SurfaceState {
  Field h;
  Spectrum h_hat;
  double t = 0.0;

  static SurfaceState from_values(const Grid& grid, Field h, double t = 0.0);
  static SurfaceState from_spectrum(const Grid& grid, Spectrum h_hat, double t = 0.0);
};

/// Radial cutoff chi with its first two derivatives.
struct CutoffProfile {
  std::function<double(double)> chi, dchi, d2chi;
  double r1 = 1.0;
  double r2 = 2.0;

  /// exp(-1/t) based transition, equal to 1 on [0, r1] and 0 beyond r2.
  static CutoffProfile smooth_step(double r1 = 1.0, double r2 = 2.0);
  /// Checks plateau, support, range and monotonicity on a dense sample.
  void validate() const;
};

/// Extension of h into the strip with its exact z-derivatives.
struct Extension {
  Field eta, eta_z, eta_zz;
};

/// eta_hat(xi, z) = chi(|z| |xi|) h_hat(xi); the z-derivatives come from
/// differentiating chi in closed form.
Extension extend_surface(const SurfaceState& h, const CutoffProfile& chi, const Grid& grid);

/// 1 + max |d_z eta| over the strip, so that d_z phi >= 1 at t = 0.
double choose_A(const SurfaceState& h0, const CutoffProfile& chi, const Grid& grid);

/// Metric quantities of phi = A z + eta on the strip.
///
/// Horizontal derivatives are spectral, vertical derivatives use the
/// collocation matrix, so mixed derivatives commute exactly on the grid.
/// Matrices are stored row-major as nc x nc blocks of fields, nc = d + 1.
struct DiffeoFrame {
  int d = 1;
  double A = 1.0;
  Field eta, phi, J;
  std::vector<Field> grad_eta;   // d_a eta, a < d
  Field eta_z, eta_zz;
  std::vector<Field> eta_az;     // d_a d_z eta
  std::vector<Field> eta_ab;     // d_a d_b eta, row-major d x d
  std::vector<Field> N, n;       // N = (-grad_y phi, 1), n = N / |N|
  std::vector<Field> P, E;

  int nc() const { return d + 1; }
  const Field& Pm(int i, int j) const { return P[i * nc() + j]; }
  const Field& Em(int i, int j) const { return E[i * nc() + j]; }
};

/// Builds the frame; throws BreakdownError when J < c0 anywhere.
DiffeoFrame assemble_frame(const SurfaceState& h, double A, const CutoffProfile& chi,
                           const Grid& grid, double c0 = 0.5);

/// Frame of the flat surface h = 0 with a given A.
DiffeoFrame flat_frame(const Grid& grid, double A = 1.0);

/// d_i^phi f: direction i < d is horizontal, i == d is the vertical one.
Field apply_dphi(const Field& f, int i, const DiffeoFrame& frame, const Grid& grid);

/// All d + 1 transformed derivatives of f, sharing the transforms.
std::vector<Field> grad_phi(const Field& f, const DiffeoFrame& frame, const Grid& grid);

/// Transformed divergence of a (d+1)-component field.
Field div_phi(const std::vector<Field>& v, const DiffeoFrame& frame, const Grid& grid);

/// (1/J) div(P v): the divergence-form expression of the same quantity.
Field div_phi_conservative(const std::vector<Field>& v, const DiffeoFrame& frame,
                           const Grid& grid);

/// Smallest eigenvalue of E over the grid.
double min_eigen_E(const DiffeoFrame& frame);

}  // namespace fsns
