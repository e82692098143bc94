#include "fsns/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fsns/error.hpp"

namespace fsns {

SurfaceState SurfaceState::from_values(const Grid& grid, Field h, double t) {
  if (static_cast<int>(h.size()) != grid.nh()) throw ShapeError("surface length != nh");
  SurfaceState s;
  s.h_hat = grid.forward(h.data(), 1);
  s.h = std::move(h);
  s.t = t;
  return s;
}

SurfaceState SurfaceState::from_spectrum(const Grid& grid, Spectrum h_hat, double t) {
  if (static_cast<int>(h_hat.size()) != grid.nhc()) throw ShapeError("surface spectrum != nhc");
  SurfaceState s;
  s.h.resize(grid.nh());
  grid.inverse(h_hat.data(), s.h.data(), 1);
  s.h_hat = std::move(h_hat);
  s.t = t;
  return s;
}

namespace {

double psi(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
double psi1(double x) { return x > 0.0 ? std::exp(-1.0 / x) / (x * x) : 0.0; }
double psi2(double x) {
  return x > 0.0 ? std::exp(-1.0 / x) * (1.0 - 2.0 * x) / (x * x * x * x) : 0.0;
}

}  // namespace

CutoffProfile CutoffProfile::smooth_step(double r1, double r2) {
  if (!(r1 >= 1.0) || !(r2 > r1)) throw DomainError("cutoff radii need 1 <= r1 < r2");
  CutoffProfile p;
  p.r1 = r1;
  p.r2 = r2;
  const double w = r2 - r1;
  p.chi = [r1, r2, w](double s) {
    if (s <= r1) return 1.0;
    if (s >= r2) return 0.0;
    const double t = (s - r1) / w;
    const double a = psi(1.0 - t), b = psi(t);
    return a / (a + b);
  };
  p.dchi = [r1, r2, w](double s) {
    if (s <= r1 || s >= r2) return 0.0;
    const double t = (s - r1) / w;
    const double a = psi(1.0 - t), b = psi(t);
    const double da = -psi1(1.0 - t), db = psi1(t);
    const double q = a + b;
    return (da * b - a * db) / (q * q) / w;
  };
  p.d2chi = [r1, r2, w](double s) {
    if (s <= r1 || s >= r2) return 0.0;
    const double t = (s - r1) / w;
    const double a = psi(1.0 - t), b = psi(t);
    const double da = -psi1(1.0 - t), db = psi1(t);
    const double dda = psi2(1.0 - t), ddb = psi2(t);
    const double q = a + b;
    const double num = (dda * b - a * ddb) * q - 2.0 * (da * b - a * db) * (da + db);
    return num / (q * q * q) / (w * w);
  };
  return p;
}

void CutoffProfile::validate() const {
  if (!chi || !dchi || !d2chi) throw DomainError("cutoff profile is incomplete");
  if (!(r1 >= 1.0) || !(r2 > r1)) throw DomainError("cutoff radii need 1 <= r1 < r2");
  const int n = 2000;
  double prev = 1.0;
  for (int i = 0; i <= n; ++i) {
    const double s = 1.5 * r2 * i / n;
    const double c = chi(s);
    if (!(c >= 0.0 && c <= 1.0)) throw DomainError("cutoff leaves [0, 1]");
    if (s <= r1 && c != 1.0) throw DomainError("cutoff is not 1 on the plateau");
    if (s >= r2 && c != 0.0) throw DomainError("cutoff is not 0 beyond its support");
    if (c > prev + 1e-15) throw DomainError("cutoff is not monotone");
    prev = c;
  }
}

Extension extend_surface(const SurfaceState& h, const CutoffProfile& chi, const Grid& grid) {
  if (static_cast<int>(h.h_hat.size()) != grid.nhc() || static_cast<int>(h.h.size()) != grid.nh())
    throw ShapeError("surface does not match the grid");
  const int nl = grid.nl(), nhc = grid.nhc();
  Spectrum e(static_cast<std::size_t>(nl) * nhc), ez(e.size()), ezz(e.size());
  for (int l = 0; l < nl; ++l) {
    const double az = -grid.z()[l];
    for (int c = 0; c < nhc; ++c) {
      const double k = std::sqrt(grid.k2(c));
      const std::size_t i = static_cast<std::size_t>(l) * nhc + c;
      const cplx hh = h.h_hat[c];
      e[i] = chi.chi(az * k) * hh;
      ez[i] = -k * chi.dchi(az * k) * hh;
      ezz[i] = k * k * chi.d2chi(az * k) * hh;
    }
  }
  return {grid.inverse(e), grid.inverse(ez), grid.inverse(ezz)};
}

double choose_A(const SurfaceState& h0, const CutoffProfile& chi, const Grid& grid) {
  const auto ext = extend_surface(h0, chi, grid);
  double m = 0.0;
  for (double v : ext.eta_z) m = std::max(m, std::abs(v));
  return 1.0 + m;
}

namespace {

DiffeoFrame build(const Grid& grid, double A, Field eta, double c0) {
  const int d = grid.d(), nc = d + 1;
  const std::size_t n = grid.size();
  const int nh = grid.nh();
  DiffeoFrame f;
  f.d = d;
  f.A = A;
  f.eta = std::move(eta);
  f.grad_eta = grid.grad_h(f.eta);
  f.eta_z = grid.dz(f.eta);
  f.eta_zz = grid.dz(f.eta_z);
  for (int a = 0; a < d; ++a) f.eta_az.push_back(grid.dz(f.grad_eta[a]));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) f.eta_ab.push_back(grid.dh(f.grad_eta[a], b));

  f.phi.resize(n);
  f.J.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = grid.z()[i / nh];
    f.phi[i] = A * z + f.eta[i];
    f.J[i] = A + f.eta_z[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(f.J[i] >= c0)) {
      std::ostringstream os;
      os << "strip map breakdown: d_z phi = " << f.J[i] << " < " << c0 << " at level "
         << i / nh << ", column " << i % nh;
      throw BreakdownError(os.str(), static_cast<int>(i / nh), static_cast<int>(i % nh), f.J[i]);
    }
  }

  f.N.assign(nc, Field(n));
  f.n.assign(nc, Field(n));
  for (std::size_t i = 0; i < n; ++i) {
    double s = 1.0;
    for (int a = 0; a < d; ++a) {
      f.N[a][i] = -f.grad_eta[a][i];
      s += f.grad_eta[a][i] * f.grad_eta[a][i];
    }
    f.N[d][i] = 1.0;
    const double inv = 1.0 / std::sqrt(s);
    for (int c = 0; c < nc; ++c) f.n[c][i] = f.N[c][i] * inv;
  }

  f.P.assign(nc * nc, Field(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < d; ++a) {
      f.P[a * nc + a][i] = f.J[i];
      f.P[d * nc + a][i] = -f.grad_eta[a][i];
    }
    f.P[d * nc + d][i] = 1.0;
  }
  f.E.assign(nc * nc, Field(n, 0.0));
  for (int r = 0; r < nc; ++r)
    for (int c = 0; c < nc; ++c)
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < nc; ++k) s += f.P[r * nc + k][i] * f.P[c * nc + k][i];
        f.E[r * nc + c][i] = s / f.J[i];
      }
  return f;
}

}  // namespace

DiffeoFrame assemble_frame(const SurfaceState& h, double A, const CutoffProfile& chi,
                           const Grid& grid, double c0) {
  if (!(A > 0.0)) throw DomainError("A must be positive");
  auto ext = extend_surface(h, chi, grid);
  return build(grid, A, std::move(ext.eta), c0);
}

DiffeoFrame flat_frame(const Grid& grid, double A) {
  return build(grid, A, Field(grid.size(), 0.0), 0.0);
}

Field apply_dphi(const Field& f, int i, const DiffeoFrame& frame, const Grid& grid) {
  if (i < 0 || i > frame.d) throw DomainError("apply_dphi: invalid direction index");
  if (f.size() != grid.size()) throw ShapeError("apply_dphi: field size mismatch");
  const Field fz = grid.dz(f);
  Field out(f.size());
  if (i == frame.d) {
    for (std::size_t k = 0; k < f.size(); ++k) out[k] = fz[k] / frame.J[k];
    return out;
  }
  const Field fa = grid.dh(f, i);
  const Field& pa = frame.grad_eta[i];
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = fa[k] - pa[k] / frame.J[k] * fz[k];
  return out;
}

std::vector<Field> grad_phi(const Field& f, const DiffeoFrame& frame, const Grid& grid) {
  if (f.size() != grid.size()) throw ShapeError("grad_phi: field size mismatch");
  const int d = frame.d;
  const Field fz = grid.dz(f);
  auto g = grid.grad_h(f);
  for (int a = 0; a < d; ++a)
    for (std::size_t k = 0; k < f.size(); ++k) g[a][k] -= frame.grad_eta[a][k] / frame.J[k] * fz[k];
  Field g3(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) g3[k] = fz[k] / frame.J[k];
  g.push_back(std::move(g3));
  return g;
}

Field div_phi(const std::vector<Field>& v, const DiffeoFrame& frame, const Grid& grid) {
  if (static_cast<int>(v.size()) != frame.nc()) throw ShapeError("div_phi: component count");
  Field out(grid.size(), 0.0);
  for (int i = 0; i <= frame.d; ++i) {
    const Field di = apply_dphi(v[i], i, frame, grid);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += di[k];
  }
  return out;
}

Field div_phi_conservative(const std::vector<Field>& v, const DiffeoFrame& frame,
                           const Grid& grid) {
  if (static_cast<int>(v.size()) != frame.nc()) throw ShapeError("div_phi: component count");
  const int d = frame.d;
  const std::size_t n = grid.size();
  Field out(n, 0.0), w(n);
  for (int a = 0; a < d; ++a) {
    for (std::size_t k = 0; k < n; ++k) w[k] = frame.J[k] * v[a][k];
    const Field da = grid.dh(w, a);
    for (std::size_t k = 0; k < n; ++k) out[k] += da[k];
  }
  for (std::size_t k = 0; k < n; ++k) {
    double s = v[d][k];
    for (int a = 0; a < d; ++a) s -= frame.grad_eta[a][k] * v[a][k];
    w[k] = s;
  }
  const Field dz = grid.dz(w);
  for (std::size_t k = 0; k < n; ++k) out[k] = (out[k] + dz[k]) / frame.J[k];
  return out;
}

double min_eigen_E(const DiffeoFrame& frame) {
  const int nc = frame.nc();
  const std::size_t n = frame.J.size();
  double m = std::numeric_limits<double>::infinity();
  if (nc == 2) {
    for (std::size_t i = 0; i < n; ++i) {
      const double a = frame.E[0][i], b = frame.E[1][i], c = frame.E[3][i];
      const double lam = 0.5 * (a + c - std::hypot(a - c, 2.0 * b));
      m = std::min(m, lam);
    }
    return m;
  }
  Eigen::Matrix3d e;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
  for (std::size_t i = 0; i < n; ++i) {
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) e(r, c) = frame.E[r * 3 + c][i];
    es.computeDirect(e, Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues()(0));
  }
  return m;
}

}  // namespace fsns
