#pragma once

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace fsns {

using cplx = std::complex<double>;
using Field = std::vector<double>;
using Spectrum = std::vector<cplx>;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Exec { serial, parallel };

struct GridSpec {
  int d = 1;      // horizontal dimensions, 1 or 2
  int nx = 64;    // points along the first horizontal direction
  int ny = 1;     // points along the second horizontal direction (d = 2 only)
  int nz = 32;    // Chebyshev polynomial degree; nz + 1 levels
  double lx = 6.283185307179586;
  double ly = 6.283185307179586;
  double depth = 2.0;
};

/// Chebyshev-Gauss-Lobatto nodes cos(pi l / n), l = 0..n, on [-1, 1].
std::vector<double> cheb_nodes(int n);
/// Collocation differentiation matrix on the nodes of cheb_nodes(n).
RowMatrix cheb_matrix(int n);
/// Clenshaw-Curtis weights on the nodes of cheb_nodes(n).
std::vector<double> clenshaw_curtis(int n);

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w);
/// Barycentric interpolation from the nodes of cheb_nodes(n) to points t.
RowMatrix cheb_interp_matrix(int n, const std::vector<double>& t);

/// Applies m (rows x cols) to a level-major block of cols levels.
Field apply_matrix(const RowMatrix& m, const Field& f, int nh, Exec ex = Exec::parallel);

struct FftPlans;

/// Periodic-by-Chebyshev strip grid.
///
/// Fields are stored level-major: index l * nh + j, where level l = 0 is the
/// surface z = 0 and l = nz is the bottom z = -H. Horizontal index j runs
/// over x (d = 1) or x-major (i * ny + j2) for d = 2. Spectra use the FFTW
/// real-to-complex half layout with nhc complex entries per level.
class Grid {
 public:
  explicit Grid(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  int d() const { return spec_.d; }
  int nl() const { return nl_; }
  int nh() const { return nh_; }
  int nhc() const { return nhc_; }
  std::size_t size() const { return static_cast<std::size_t>(nl_) * nh_; }
  double depth() const { return spec_.depth; }

  const std::vector<double>& z() const { return z_; }
  const std::vector<double>& wz() const { return wz_; }
  double cell_area() const { return cell_area_; }
  double area() const { return cell_area_ * nh_; }
  const RowMatrix& dmat() const { return d_; }

  /// Horizontal coordinate of column j along direction a.
  double coord(int a, int j) const;

  /// Wavenumber of spectral index c along direction a, Nyquist kept.
  double wavenumber(int a, int c) const { return k_[a][c]; }
  /// Wavenumber used for first derivatives (zero on Nyquist lines).
  double deriv_wavenumber(int a, int c) const { return kd_[a][c]; }
  /// |xi|^2 with the true wavenumbers.
  double k2(int c) const { return k2_[c]; }
  /// Multiplicity of spectral index c in a full-spectrum sum (1 or 2).
  double multiplicity(int c) const { return mult_[c]; }

  // Horizontal transforms on `levels` stacked levels of nh values each.
  // inverse() includes the 1/nh normalisation.
  Spectrum forward(const double* in, int levels) const;
  void inverse(const cplx* in, double* out, int levels) const;
  Spectrum forward(const Field& f) const;
  Field inverse(const Spectrum& s) const;

  /// Spectral derivative along horizontal direction a (works for any
  /// number of stacked levels deduced from the field length).
  Field dh(const Field& f, int a) const;
  /// All horizontal derivatives from a single forward transform.
  std::vector<Field> grad_h(const Field& f) const;
  /// d/dz by Chebyshev collocation.
  Field dz(const Field& f, Exec ex = Exec::parallel) const;
  /// Transpose of the d/dz matrix applied to f.
  Field dz_t(const Field& f, Exec ex = Exec::parallel) const;

  /// Flat quadrature of f*g over the strip (Clenshaw-Curtis in z).
  double integrate(const Field& f) const;
  double dot(const Field& f, const Field& g) const;
  double l2(const Field& f) const;
  /// Horizontal quadrature of a single-level field.
  double integrate_level(const double* f) const;

 private:
  GridSpec spec_;
  int nl_, nh_, nhc_;
  std::vector<double> z_, wz_;
  double cell_area_;
  RowMatrix d_, dt_;
  std::vector<std::vector<double>> k_, kd_;
  std::vector<double> k2_, mult_;
  std::shared_ptr<const FftPlans> plans_;
};

bool is_power_of_two(int n);

}  // namespace fsns
