#include "fsns/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/random/sobol.hpp>

#include "fsns/error.hpp"
#include "fsns/geometry.hpp"
#include "fsns/grid.hpp"

namespace fsns {

namespace {

const double kPi = std::numbers::pi;

double apply_rule(const CCRule& r, const std::function<double(double)>& f, double a, double b,
                  int panels) {
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h, mid = lo + 0.5 * h;
    double s = 0.0;
    for (std::size_t k = 0; k < r.x.size(); ++k) s += r.w[k] * f(mid + 0.5 * h * r.x[k]);
    sum += 0.5 * h * s;
  }
  return sum;
}

}  // namespace

CCRule cc_rule(int n) {
  if (n < 1) throw DomainError("cc_rule: degree must be positive");
  return {cheb_nodes(n), clenshaw_curtis(n)};
}

QuadResult composite_cc(const std::function<double(double)>& f, double a, double b, int panels,
                        int n) {
  if (panels < 1) throw DomainError("composite_cc: panels must be positive");
  const CCRule r = cc_rule(n);
  const double coarse = apply_rule(r, f, a, b, panels);
  const double fine = apply_rule(r, f, a, b, 2 * panels);
  return {fine, std::abs(fine - coarse)};
}

// ---------------------------------------------------------------------------

double heat_trace_gain(double gamma, double tau, double xi, double eps) {
  if (!(gamma >= 1.0)) throw DomainError("heat_trace_gain: gamma >= 1 required");
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("heat_trace_gain: eps in (0, 1] required");
  // int_{-inf}^0 |exp(r z / sqrt(eps))|^2 dz = sqrt(eps) / (2 Re r).
  const std::complex<double> r = std::sqrt(std::complex<double>(gamma + eps * xi * xi, tau));
  return std::sqrt(gamma + std::abs(tau)) / (2.0 * r.real());
}

HeatSummary heat_sweep(int per_axis, double gamma_min) {
  if (per_axis < 2) throw DomainError("heat_sweep: need at least two points per axis");
  auto logspace = [per_axis](double lo, double hi) {
    std::vector<double> v(per_axis);
    for (int i = 0; i < per_axis; ++i)
      v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (per_axis - 1));
    return v;
  };
  const auto gammas = logspace(gamma_min, 1e4 * gamma_min);
  const auto eps = logspace(1e-8, 1.0);
  std::vector<double> taus = logspace(1e-2, 1e8), xis = logspace(1e-2, 1e6);
  // Signed frequencies and the zero modes.
  for (int i = 0; i < per_axis; i += 2) taus[i] = -taus[i];
  taus[0] = 0.0;
  xis[0] = 0.0;

  HeatSummary s;
  s.min_ratio = std::numeric_limits<double>::infinity();
  for (double g : gammas)
    for (double t : taus)
      for (double x : xis)
        for (double e : eps) {
          const double r = heat_trace_gain(g, t, x, e);
          ++s.samples;
          if (!(r <= 1.0)) ++s.violations;
          s.max_ratio = std::max(s.max_ratio, r);
          s.min_ratio = std::min(s.min_ratio, r);
        }
  s.spot_gamma = heat_trace_gain(1.0, 0.0, 0.0, 1.0);
  s.spot_tau = heat_trace_gain(1.0, 1e12, 0.0, 1.0);
  return s;
}

// ---------------------------------------------------------------------------

namespace {

void require_resolved(const QuadResult& q, const char* what) {
  if (!std::isfinite(q.value) || !(q.error <= 1e-9 * (1.0 + std::abs(q.value))))
    throw QuadratureError(std::string("unresolved integral: ") + what);
}

double drift_integral(const std::function<double(double)>& gamma, double a, double b) {
  if (b <= a) return 0.0;
  const QuadResult q = composite_cc(gamma, a, b, 8, 16);
  require_resolved(q, "drift");
  return q.value;
}

// Extended initial profile F and zeta F'(zeta) on the whole line.
struct Extended {
  const Profile& p;
  bool odd;
  double F(double s) const {
    const double a = std::abs(s);
    if (a > p.support) return 0.0;
    const double v = p.f(a);
    return (s < 0.0 && odd) ? -v : v;
  }
  double zdF(double s) const {
    const double a = std::abs(s);
    if (a > p.support) return 0.0;
    const double v = a * p.df(a);
    return (s < 0.0 && odd) ? -v : v;
  }
};

// Integral over [lo, hi] split at the given breakpoints.
QuadResult piecewise(const std::function<double(double)>& f, double lo, double hi,
                     std::vector<double> cuts, int panels, int degree) {
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  QuadResult out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = std::max(lo, cuts[i]), b = std::min(hi, cuts[i + 1]);
    if (b <= a) continue;
    const QuadResult q = composite_cc(f, a, b, panels, degree);
    out.value += q.value;
    out.error += q.error;
  }
  return out;
}

}  // namespace

FpKernel fp_kernel(const std::function<double(double)>& gamma, const FpOptions& opt) {
  if (!(opt.eps > 0.0)) throw DomainError("fp_kernel: eps must be positive");
  if (!(opt.t > opt.tau)) throw DomainError("fp_kernel: t must exceed tau");
  FpKernel k;
  k.big_gamma = drift_integral(gamma, opt.tau, opt.t);
  const QuadResult b = composite_cc(
      [&](double s) { return std::exp(2.0 * (k.big_gamma - drift_integral(gamma, opt.tau, s))); },
      opt.tau, opt.t, 8, 16);
  require_resolved(b, "kernel spread");
  k.spread = b.value;
  const double var = 4.0 * opt.eps * k.spread;
  const double w = 12.0 * std::sqrt(0.5 * var);
  const QuadResult m = composite_cc(
      [var](double x) { return std::exp(-x * x / var) / std::sqrt(kPi * var); }, -w, w,
      opt.panels, opt.degree);
  require_resolved(m, "kernel mass");
  k.mass = m.value;
  return k;
}

FpEvolution fp_evolve(const Profile& f0, const std::function<double(double)>& gamma,
                      const std::vector<double>& z, const FpOptions& opt) {
  if (opt.odd_extension && std::abs(f0.f(0.0)) > 1e-14)
    throw PreconditionError("fp_evolve: odd extension needs f0(0) = 0");
  FpEvolution out;
  out.kernel = fp_kernel(gamma, opt);
  out.max_mass_defect = std::abs(out.kernel.mass - 1.0);
  if (out.max_mass_defect > opt.mass_tol)
    throw QuadratureError("fp_evolve: kernel mass defect above tolerance");

  const Extended ext{f0, opt.odd_extension};
  const double var = 4.0 * opt.eps * out.kernel.spread;
  const double norm = 1.0 / std::sqrt(kPi * var);
  const double w = 12.0 * std::sqrt(0.5 * var);
  const double shrink = std::exp(-out.kernel.big_gamma);
  const double edge = f0.support / shrink;
  const std::vector<double> cuts = {-edge, 0.0, edge};

  out.z = z;
  out.g.resize(z.size());
  out.z_dz_g.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double zi = z[i];
    const double lo = std::max(zi - w, -edge), hi = std::min(zi + w, edge);
    if (hi <= lo) continue;
    auto k = [&](double zp) {
      const double x = zi - zp;
      return norm * std::exp(-x * x / var);
    };
    const QuadResult g = piecewise([&](double zp) { return k(zp) * ext.F(shrink * zp); }, lo, hi,
                                   cuts, opt.panels / 4, opt.degree);
    // (z - z') d_z k = -2 (z - z')^2 / var k; the z' d_z' k part moves onto f0.
    const QuadResult a = piecewise(
        [&](double zp) {
          const double x = zi - zp;
          return -2.0 * x * x / var * k(zp) * ext.F(shrink * zp);
        },
        lo, hi, cuts, opt.panels / 4, opt.degree);
    const QuadResult b = piecewise(
        [&](double zp) { return k(zp) * (ext.F(shrink * zp) + ext.zdF(shrink * zp)); }, lo, hi,
        cuts, opt.panels / 4, opt.degree);
    out.g[i] = g.value;
    out.z_dz_g[i] = a.value + b.value;
    out.quad_error = std::max({out.quad_error, g.error, a.error + b.error});
  }
  return out;
}

FpBound fp_conormal_bound(const Profile& f0, const std::function<double(double)>& gamma,
                          double eps, const std::vector<double>& t_grid, int nz) {
  double f_inf = 0.0, zdf_inf = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double z = f0.support * i / 4000.0;
    f_inf = std::max(f_inf, std::abs(f0.f(z)));
    zdf_inf = std::max(zdf_inf, std::abs(z * f0.df(z)));
  }
  if (!(f_inf > 0.0)) throw DomainError("fp_conormal_bound: zero profile");

  FpBound b;
  for (double t : t_grid) {
    FpOptions opt;
    opt.eps = eps;
    opt.t = t;
    const FpKernel k = fp_kernel(gamma, opt);
    const double zmax = f0.support * std::exp(k.big_gamma) + 12.0 * std::sqrt(2.0 * eps * k.spread);
    std::vector<double> z(nz);
    for (int i = 0; i < nz; ++i) z[i] = zmax * i / (nz - 1);
    const FpEvolution e = fp_evolve(f0, gamma, z, opt);
    double g_inf = 0.0, zdg_inf = 0.0;
    for (int i = 0; i < nz; ++i) {
      g_inf = std::max(g_inf, std::abs(e.g[i]));
      zdg_inf = std::max(zdg_inf, std::abs(e.z_dz_g[i]));
    }
    b.ratio = std::max(b.ratio, zdg_inf / (f_inf + zdf_inf));
    b.contraction = std::max(b.contraction, g_inf / f_inf);
    b.max_mass_defect = std::max(b.max_mass_defect, e.max_mass_defect);
  }
  return b;
}

// ---------------------------------------------------------------------------

bool admissible(const SymbolPoint& p, const SymbolBounds& b, double tol) {
  if (!((p.a - p.a.transpose()).cwiseAbs().maxCoeff() <= tol)) return false;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(p.a);
  const double lmin = es.eigenvalues()(0), lmax = es.eigenvalues()(2);
  const double xi2 = p.xi1 * p.xi1 + p.xi2 * p.xi2;
  const double sphere = p.gamma * p.gamma + p.tau * p.tau + xi2 * xi2;
  return p.a0 >= b.m - tol && p.a(2, 2) >= b.m - tol && lmax <= b.M + tol &&
         lmin >= b.c0 - tol && p.gamma >= 0.0 && std::abs(sphere - 1.0) <= 1e-9;
}

CMat2 symbol_matrix(const SymbolPoint& p) {
  const double a33 = p.a(2, 2);
  const double xi[2] = {p.xi1, p.xi2};
  double ay = 0.0, az = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) ay += p.a(i, j) * xi[i] * xi[j];
    az += p.a(i, 2) * xi[i];
  }
  CMat2 m;
  m << 0.0, 1.0, cplx2(p.a0 * p.gamma + ay, p.a0 * p.tau) / a33, cplx2(0.0, -2.0 * az / a33);
  return m;
}

SymmetrizerResult symmetrize(const SymbolPoint& p, double delta) {
  const CMat2 A = symbol_matrix(p);
  // mu^2 - A_z mu - c = 0 with c = A(1, 0), A_z = A(1, 1).
  const cplx2 root = std::sqrt(A(1, 1) * A(1, 1) + 4.0 * A(1, 0));
  cplx2 m1 = 0.5 * (A(1, 1) + root), m2 = 0.5 * (A(1, 1) - root);
  if (m1.real() < m2.real()) std::swap(m1, m2);
  if (!(m1.real() > 1e-12) || !(m2.real() < -1e-12))
    throw SearchFailure("symmetrizer: eigenvalue on the imaginary axis");

  SymmetrizerResult r;
  r.mu_plus = m1;
  r.mu_minus = m2;
  r.delta = delta;
  r.P.col(0) = Eigen::Vector2cd(1.0, m1).normalized();
  r.P.col(1) = Eigen::Vector2cd(1.0, m2).normalized();
  const CMat2 Pinv = r.P.inverse();
  CMat2 D = CMat2::Zero();
  D(0, 0) = 1.0;
  D(1, 1) = -delta;
  r.S = Pinv.adjoint() * D * Pinv;
  r.S = 0.5 * (r.S + r.S.adjoint()).eval();

  const CMat2 SA = r.S * A;
  const CMat2 herm = SA + SA.adjoint();
  CMat2 bnd = r.S;
  bnd(0, 0) += 1.0;
  r.kappa_sa = Eigen::SelfAdjointEigenSolver<CMat2>(herm).eigenvalues()(0);
  r.kappa_bnd = Eigen::SelfAdjointEigenSolver<CMat2>(bnd).eigenvalues()(0);
  r.kappa = std::min(r.kappa_sa, r.kappa_bnd);
  return r;
}

std::vector<double> default_delta_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 20; ++k) g.push_back(std::ldexp(1.0, -k));
  return g;
}

SymmetrizerResult symmetrizer(const SymbolPoint& p, const std::vector<double>& delta_grid,
                              double kappa_min) {
  std::vector<double> grid = delta_grid;
  std::sort(grid.begin(), grid.end(), std::greater<>());
  for (double d : grid) {
    SymmetrizerResult r = symmetrize(p, d);
    if (r.kappa >= kappa_min) return r;
  }
  throw SearchFailure("symmetrizer: no admissible delta on the grid");
}

namespace {

// Rotation from three uniforms (uniform on SO(3)).
Eigen::Matrix3d rotation(double u1, double u2, double u3) {
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  const Eigen::Quaterniond q(b * std::cos(2 * kPi * u3), a * std::sin(2 * kPi * u2),
                             a * std::cos(2 * kPi * u2), b * std::sin(2 * kPi * u3));
  return q.normalized().toRotationMatrix();
}

SymbolPoint with_frequency(SymbolPoint p, double g, double t, double xi_sq, double angle) {
  const double r = std::sqrt(std::max(0.0, xi_sq));
  p.gamma = g;
  p.tau = t;
  p.xi1 = r * std::cos(angle);
  p.xi2 = r * std::sin(angle);
  return p;
}

// Coefficients whose softest direction is (1, 0, 1) / sqrt(2): with
// xi = (1, 0) and gamma = tau = 0 this is where the eigenvalues approach the
// imaginary axis.
std::vector<SymbolPoint> corner_probes(const SymbolBounds& b) {
  Eigen::Matrix3d q;
  q << 1.0 / std::sqrt(2.0), 0.0, -1.0 / std::sqrt(2.0), 0.0, 1.0, 0.0, 1.0 / std::sqrt(2.0), 0.0,
      1.0 / std::sqrt(2.0);
  const Eigen::Matrix3d soft = q * Eigen::Vector3d(b.c0, b.M, b.M).asDiagonal() * q.transpose();
  std::vector<SymbolPoint> out;
  for (const Eigen::Matrix3d& a : {soft, Eigen::Matrix3d(Eigen::Matrix3d::Identity() * b.M)})
    for (double a0 : {b.m, b.M}) {
      SymbolPoint p;
      p.a0 = a0;
      p.a = a;
      out.push_back(with_frequency(p, 1.0, 0.0, 0.0, 0.0));
      out.push_back(with_frequency(p, 0.0, 1.0, 0.0, 0.0));
      out.push_back(with_frequency(p, 0.0, -1.0, 0.0, 0.0));
      out.push_back(with_frequency(p, 0.0, 0.0, 1.0, 0.0));
      out.push_back(with_frequency(p, 0.0, 0.0, 1.0, 0.5 * kPi));
    }
  return out;
}

}  // namespace

std::vector<SymbolPoint> sample_symbol_points(const SymbolBounds& b, int count) {
  if (!(b.m > 0.0) || !(b.M >= b.m) || !(b.c0 >= 0.0) || !(b.M >= b.c0))
    throw DomainError("sample_symbol_points: inconsistent bounds");
  std::vector<SymbolPoint> out = corner_probes(b);
  if (static_cast<int>(out.size()) > count) out.resize(count);
  boost::random::sobol qrng(10);
  std::vector<double> u(10);
  const double scale = 1.0 / (static_cast<double>(qrng.max()) + 1.0);
  int guard = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++guard > 1000 * count) throw SearchFailure("sample_symbol_points: rejection stalled");
    for (double& x : u) x = qrng() * scale;
    SymbolPoint p;
    p.a0 = b.m + (b.M - b.m) * u[0];
    const Eigen::Vector3d lam(b.c0 + (b.M - b.c0) * u[1], b.c0 + (b.M - b.c0) * u[2],
                              b.c0 + (b.M - b.c0) * u[3]);
    const Eigen::Matrix3d R = rotation(u[4], u[5], u[6]);
    p.a = R * lam.asDiagonal() * R.transpose();
    p.a = 0.5 * (p.a + p.a.transpose()).eval();
    if (p.a(2, 2) < b.m) continue;
    // Quarter of the unit sphere in (gamma, tau, |xi|^2).
    const double g = u[7], r = std::sqrt(1.0 - g * g), th = kPi * (u[8] - 0.5);
    out.push_back(with_frequency(p, g, r * std::sin(th), r * std::cos(th), 2 * kPi * u[9]));
  }
  return out;
}

SymmetrizerSummary symmetrizer_sweep(const SymbolBounds& b, int count, double kappa_min) {
  const auto pts = sample_symbol_points(b, count);
  SymmetrizerSummary s;
  s.samples = static_cast<int>(pts.size());
  s.min_re_split = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    const CMat2 A = symbol_matrix(p);
    const cplx2 root = std::sqrt(A(1, 1) * A(1, 1) + 4.0 * A(1, 0));
    const double r1 = (0.5 * (A(1, 1) + root)).real(), r2 = (0.5 * (A(1, 1) - root)).real();
    const double split = std::min(std::max(r1, r2), -std::min(r1, r2));
    if (!(split > 1e-12)) ++s.axis_eigenvalues;
    s.min_re_split = std::min(s.min_re_split, split);
  }
  if (s.axis_eigenvalues > 0)
    throw SearchFailure("symmetrizer_sweep: eigenvalue on the imaginary axis");

  auto grid = default_delta_grid();
  std::sort(grid.begin(), grid.end(), std::greater<>());
  for (double d : grid) {
    double kmin = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) kmin = std::min(kmin, symmetrize(p, d).kappa);
    if (kmin >= kappa_min) {
      s.delta = d;
      s.kappa = kmin;
      return s;
    }
  }
  throw SearchFailure("symmetrizer_sweep: no delta valid for the whole sample");
}

// ---------------------------------------------------------------------------

double hardy_ratio(const HalfLineProfile& p) {
  if (std::abs(p.f(0.0)) > 1e-14) throw PreconditionError("hardy_ratio: f(0) must vanish");
  const double d0 = p.df(0.0);
  auto weighted = [&](double z) {
    const double q = (z == 0.0) ? d0 : p.f(z) / (z * (1.0 - z));
    return q * q;
  };
  auto grad = [&](double z) {
    const double g = p.df(z);
    return g * g;
  };
  // Geometric panels toward z = 0.
  double num = 0.0, den = 0.0;
  double hi = 0.0;
  for (int k = 80; k >= 0; --k) {
    const double lo = -p.extent * std::ldexp(1.0, -k);
    num += composite_cc(weighted, lo, hi, 1, 24).value;
    den += composite_cc(grad, lo, hi, 1, 24).value;
    hi = lo;
  }
  if (!(den > 0.0)) throw DomainError("hardy_ratio: zero gradient");
  return num / den;
}

std::vector<HalfLineProfile> hardy_corpus() {
  std::vector<HalfLineProfile> c;
  c.push_back({"z_exp", [](double z) { return z * std::exp(z); },
               [](double z) { return (1.0 + z) * std::exp(z); }, 60.0});
  c.push_back({"z_gauss", [](double z) { return z * std::exp(-z * z); },
               [](double z) { return (1.0 - 2.0 * z * z) * std::exp(-z * z); }, 12.0});
  const CutoffProfile cut = CutoffProfile::smooth_step(kPi, 2.0 * kPi);
  c.push_back({"sin_cutoff", [cut](double z) { return std::sin(z) * cut.chi(-z); },
               [cut](double z) { return std::cos(z) * cut.chi(-z) - std::sin(z) * cut.dchi(-z); },
               2.0 * kPi});
  c.push_back({"tanh_exp", [](double z) { return std::tanh(z) * std::exp(0.25 * z); },
               [](double z) {
                 const double c = 1.0 / std::cosh(z);
                 return (c * c + 0.25 * std::tanh(z)) * std::exp(0.25 * z);
               },
               200.0});
  c.push_back({"rational", [](double z) { return z / ((1.0 - z) * (1.0 - z)); },
               [](double z) { return (1.0 + z) / std::pow(1.0 - z, 3); }, 1e6});
  c.push_back({"power_0.6", [](double z) { return -std::pow(-z, 0.6) * std::exp(z); },
               [](double z) {
                 if (z == 0.0) return 0.0;
                 return (0.6 * std::pow(-z, -0.4) - std::pow(-z, 0.6)) * std::exp(z);
               },
               60.0});
  return c;
}

}  // namespace fsns
