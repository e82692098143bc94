#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fsns {

// ---------------------------------------------------------------------------
// Quadrature

/// Clenshaw-Curtis nodes and weights on [-1, 1] with n + 1 points.
struct CCRule {
  std::vector<double> x, w;
};
CCRule cc_rule(int n);

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // |Q(2 panels) - Q(panels)|
};

/// Composite Clenshaw-Curtis rule with `panels` equal panels of degree n;
/// the error estimate comes from doubling the panel count.
QuadResult composite_cc(const std::function<double(double)>& f, double a, double b, int panels,
                        int n = 16);

// ---------------------------------------------------------------------------
// Heat trace gain

/// R = (gamma + |tau|)^(1/2) ||f||^2_{L2(z<0)} / (sqrt(eps) |f_b|^2) for
/// f(z) = exp(sqrt(gamma + i tau + eps xi^2) z / sqrt(eps)) f_b, integrated
/// in closed form. Requires gamma >= 1 and eps in (0, 1].
double heat_trace_gain(double gamma, double tau, double xi, double eps);

struct HeatSummary {
  int samples = 0;
  int violations = 0;  // R > 1
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  double spot_gamma = 0.0;  // R(1, 0, 0, 1)
  double spot_tau = 0.0;    // R(1, 1e12, 0, 1)
};

/// Tensor grid of `per_axis`^4 modes over (gamma, tau, xi, eps).
HeatSummary heat_sweep(int per_axis = 10, double gamma_min = 1.0);

// ---------------------------------------------------------------------------
// Fokker-Planck kernel

/// Half-line profile with its derivative, given for z >= 0.
struct Profile {
  std::function<double(double)> f, df;
  double support = 1.0;  // f vanishes for z > support
};

struct FpOptions {
  double eps = 1e-2;
  double tau = 0.0;
  double t = 1.0;
  bool odd_extension = true;  // otherwise f is taken even
  int panels = 48;
  int degree = 16;
  double mass_tol = 1e-8;
};

/// Solution of d_t g + z gamma(t) d_z g - eps d_zz g = 0 through the explicit
/// Gaussian kernel of variance 2 eps B(t), B = int_tau^t exp(2 (G(t) - G(s))) ds,
/// G(t) = int_tau^t gamma.
struct FpKernel {
  double big_gamma = 0.0;  // G(t)
  double spread = 0.0;     // B(t)
  double mass = 1.0;       // quadrature of the kernel over R
};

FpKernel fp_kernel(const std::function<double(double)>& gamma, const FpOptions& opt);

struct FpEvolution {
  std::vector<double> z, g, z_dz_g;
  FpKernel kernel;
  double max_mass_defect = 0.0;
  double quad_error = 0.0;
};

/// Evaluates g(t, z) and z d_z g at the given points, the latter through the
/// split z d_z k = (z - z') d_z k - z' d_z' k and an integration by parts.
/// Throws QuadratureError if the drift or a kernel integral is not resolved.
FpEvolution fp_evolve(const Profile& f0, const std::function<double(double)>& gamma,
                      const std::vector<double>& z, const FpOptions& opt);

/// max_t ||z d_z g(t)||_inf / (||f0||_inf + ||z d_z f0||_inf) over t_grid.
struct FpBound {
  double ratio = 0.0;
  double contraction = 0.0;  // max_t ||g(t)||_inf / ||f0||_inf
  double max_mass_defect = 0.0;
};
FpBound fp_conormal_bound(const Profile& f0, const std::function<double(double)>& gamma,
                          double eps, const std::vector<double>& t_grid, int nz = 200);

// ---------------------------------------------------------------------------
// Parabolic symmetrizer

using cplx2 = std::complex<double>;
using CMat2 = Eigen::Matrix2cd;

struct SymbolPoint {
  double a0 = 1.0;
  Eigen::Matrix3d a = Eigen::Matrix3d::Identity();
  double gamma = 1.0, tau = 0.0;  // on the quartic sphere
  double xi1 = 0.0, xi2 = 0.0;
};

/// Bounds of the compact coefficient set.
struct SymbolBounds {
  double m = 0.5;
  double M = 4.0;
  double c0 = 0.25;
};

bool admissible(const SymbolPoint& p, const SymbolBounds& b, double tol = 1e-12);

/// The 2 x 2 first-order system matrix of the Fourier-Laplace symbol.
CMat2 symbol_matrix(const SymbolPoint& p);

struct SymmetrizerResult {
  cplx2 mu_plus, mu_minus;
  CMat2 P, S;
  double delta = 0.0;
  double kappa = 0.0;      // min of both lower bounds
  double kappa_sa = 0.0;   // lambda_min(S A + (S A)*)
  double kappa_bnd = 0.0;  // lambda_min(S + Gamma* Gamma)
};

/// Eigen-split of the symbol matrix and S = (P^-1)* diag(1, -delta) P^-1.
/// Throws SearchFailure if an eigenvalue sits on the imaginary axis.
SymmetrizerResult symmetrize(const SymbolPoint& p, double delta);

/// Largest delta of the grid with both bounds >= kappa_min; SearchFailure
/// if none passes.
SymmetrizerResult symmetrizer(const SymbolPoint& p, const std::vector<double>& delta_grid,
                              double kappa_min = 1e-3);

/// Default grid: 2^-k for k = 0..20.
std::vector<double> default_delta_grid();

/// Sobol sample of admissible points plus deterministic corner probes.
std::vector<SymbolPoint> sample_symbol_points(const SymbolBounds& b, int count);

struct SymmetrizerSummary {
  int samples = 0;
  int axis_eigenvalues = 0;  // |Re mu| below 1e-12
  double delta = 0.0;        // common delta passing at every sample
  double kappa = 0.0;        // min kappa over the sample at that delta
  double min_re_split = 0.0; // min(Re mu+, -Re mu-)
};

/// Finds one delta valid for the whole sample; SearchFailure if none.
SymmetrizerSummary symmetrizer_sweep(const SymbolBounds& b, int count, double kappa_min = 1e-3);

// ---------------------------------------------------------------------------
// Hardy inequality

/// Profile on z <= 0 with f(0) = 0.
struct HalfLineProfile {
  std::string name;
  std::function<double(double)> f, df;
  double extent = 40.0;  // integrate over [-extent, 0]
};

/// int f^2 / (z^2 (1 - z)^2) divided by int (f')^2 over z < 0.
/// Throws PreconditionError if f(0) != 0.
double hardy_ratio(const HalfLineProfile& p);

std::vector<HalfLineProfile> hardy_corpus();

}  // namespace fsns
