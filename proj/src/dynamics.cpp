#include "fsns/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fsns/error.hpp"
#include "fsns/krylov.hpp"

namespace fsns {

namespace {

// Nodal matrix of the Chebyshev modal filter sigma_k = exp(-alpha (k / n)^p)
// on the Gauss-Lobatto nodes.
RowMatrix modal_filter(int n, int p, double alpha) {
  const double pi = std::numbers::pi;
  RowMatrix fwd(n + 1, n + 1), inv(n + 1, n + 1);
  for (int k = 0; k <= n; ++k)
    for (int l = 0; l <= n; ++l) {
      const double c = std::cos(pi * k * l / n);
      const double wl = (l == 0 || l == n) ? 0.5 : 1.0;
      const double wk = (k == 0 || k == n) ? 0.5 : 1.0;
      fwd(k, l) = 2.0 / n * wk * wl * c;
      inv(l, k) = c;
    }
  Eigen::VectorXd sigma(n + 1);
  for (int k = 0; k <= n; ++k) sigma[k] = std::exp(-alpha * std::pow(static_cast<double>(k) / n, p));
  return inv * sigma.asDiagonal() * fwd;
}


const double kGamma = 1.0 - 1.0 / std::sqrt(2.0);
const double kDelta = 1.0 - 1.0 / (2.0 * kGamma);

Vec pack(const std::vector<Field>& v) {
  Vec out;
  for (const auto& f : v) out.insert(out.end(), f.begin(), f.end());
  return out;
}

std::vector<Field> unpack(const Vec& x, int nc, std::size_t n) {
  std::vector<Field> v(nc);
  for (int i = 0; i < nc; ++i)
    v[i].assign(x.begin() + static_cast<std::ptrdiff_t>(i * n),
                x.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
  return v;
}

std::vector<Field> axpy(const std::vector<Field>& x, double a, const std::vector<Field>& y) {
  std::vector<Field> out = x;
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t k = 0; k < out[i].size(); ++k) out[i][k] += a * y[i][k];
  return out;
}

Field axpy(const Field& x, double a, const Field& y) {
  Field out = x;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += a * y[k];
  return out;
}

}  // namespace

Field laplacian_phi(const Field& f, const DiffeoFrame& frame, const Grid& grid) {
  const auto g = grad_phi(f, frame, grid);
  Field out(f.size(), 0.0);
  for (int j = 0; j <= frame.d; ++j) {
    const Field dj = apply_dphi(g[j], j, frame, grid);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += dj[k];
  }
  return out;
}

Stepper::Stepper(const Grid& grid, CutoffProfile chi, double A, DynamicsConfig cfg)
    : grid_(grid),
      chi_(std::move(chi)),
      A_(A),
      cfg_(cfg),
      pressure_(grid, A, BottomCondition::neumann_zero) {
  if (!(cfg.eps >= 0.0)) throw ConfigError("viscosity must be nonnegative");
  if (!(cfg.gravity > 0.0)) throw ConfigError("gravity must be positive");
  if (cfg.filter_order < 0 || cfg.filter_order % 2 != 0)
    throw ConfigError("filter order must be a nonnegative even integer");
  if (cfg.filter_order > 0) filter_ = modal_filter(grid.nl() - 1, cfg.filter_order, cfg.filter_strength);
  // The bottom must stay flat: every nonzero mode is cut off at z = -H.
  const double H = grid.depth();
  for (int c = 1; c < grid.nhc(); ++c) {
    const double s = H * std::sqrt(grid.k2(c));
    if (chi_.chi(s) != 0.0 || chi_.dchi(s) != 0.0) {
      std::ostringstream os;
      os << "extension reaches the bottom: H |xi| = " << s << " < cutoff support "
         << chi_.r2;
      throw SetupError(os.str());
    }
  }
}

DiffeoFrame Stepper::frame_of(const SurfaceState& h) const {
  return assemble_frame(h, A_, chi_, grid_, cfg_.c0);
}

FlowState Stepper::make_state(std::vector<Field> v, SurfaceState h, double t) const {
  if (static_cast<int>(v.size()) != grid_.d() + 1) throw ShapeError("velocity needs d + 1 components");
  for (const auto& c : v)
    if (c.size() != grid_.size()) throw ShapeError("velocity component size mismatch");
  FlowState s;
  s.frame = frame_of(h);
  s.v = std::move(v);
  s.surface = std::move(h);
  s.surface.t = t;
  s.t = t;
  s.eps = cfg_.eps;
  return s;
}

Tendency Stepper::explicit_rhs(const FlowState& s) {
  const int d = grid_.d(), nc = d + 1, nh = grid_.nh();
  const std::size_t n = grid_.size();
  const DiffeoFrame& fr = s.frame;
  const auto grad = velocity_gradient(s.v, fr, grid_);

  Tendency t;
  {
    EllipticProblem p;
    p.frame = &fr;
    p.bottom = BottomCondition::neumann_zero;
    p.rhs_plain = euler_pressure_source(grad, fr, nc);
    p.top_data.resize(nh);
    for (int j = 0; j < nh; ++j) p.top_data[j] = cfg_.gravity * s.surface.h[j];
    auto sol = pressure_.solve(p, cfg_.pressure_tol, cfg_.pressure_max_iter);
    stats_.pressure_iterations += sol.report.iterations;
    t.qE = std::move(sol.rho);
  }
  if (cfg_.eps > 0.0) {
    Field top = normal_stress_top(strain(grad, nc), fr, grid_);
    for (double& x : top) x *= 2.0 * cfg_.eps;
    EllipticProblem p;
    p.frame = &fr;
    p.bottom = BottomCondition::neumann_zero;
    p.rhs_plain = Field(n, 0.0);
    p.top_data = std::move(top);
    auto sol = pressure_.solve(p, cfg_.pressure_tol, cfg_.pressure_max_iter);
    stats_.pressure_iterations += sol.report.iterations;
    t.qNS = std::move(sol.rho);
  } else {
    t.qNS.assign(n, 0.0);
  }
  Field q(n);
  for (std::size_t k = 0; k < n; ++k) q[k] = t.qE[k] + t.qNS[k];
  const auto gq = grad_phi(q, fr, grid_);

  // Kinematic condition and the time derivative of the extension.
  t.dh.resize(nh);
  for (int j = 0; j < nh; ++j) {
    double vn = s.v[d][j];
    for (int a = 0; a < d; ++a) vn -= s.v[a][j] * fr.grad_eta[a][j];
    t.dh[j] = vn;
  }
  const Field eta_t = extend_surface(SurfaceState::from_values(grid_, t.dh), chi_, grid_).eta;

  // d_t v = -(v . grad^phi) v + (d_t eta / J) d_z v - grad^phi q.
  t.dv.assign(nc, Field(n));
  for (int i = 0; i < nc; ++i) {
    Field& out = t.dv[i];
    for (std::size_t k = 0; k < n; ++k) {
      double acc = eta_t[k] * grad[i * nc + d][k] - gq[i][k];
      for (int j = 0; j < nc; ++j) acc -= s.v[j][k] * grad[i * nc + j][k];
      out[k] = acc;
    }
  }
  // No penetration through the flat bottom.
  std::fill(t.dv[d].begin() + static_cast<std::ptrdiff_t>(grid_.nl() - 1) * nh, t.dv[d].end(), 0.0);
  return t;
}

std::vector<Field> Stepper::viscous_apply(const std::vector<Field>& u, const DiffeoFrame& fr,
                                          double c) const {
  const int d = grid_.d(), nc = d + 1, nh = grid_.nh(), nz = grid_.nl() - 1;
  const std::size_t n = grid_.size(), bot = static_cast<std::size_t>(nz) * nh;
  std::vector<std::vector<Field>> g(nc);
  for (int i = 0; i < nc; ++i) g[i] = grad_phi(u[i], fr, grid_);
  std::vector<Field> out(nc, Field(n));
  for (int i = 0; i < nc; ++i) {
    Field lap(n, 0.0);
    for (int j = 0; j < nc; ++j) {
      const Field dj = apply_dphi(g[i][j], j, fr, grid_);
      for (std::size_t k = 0; k < n; ++k) lap[k] += dj[k];
    }
    for (std::size_t k = 0; k < n; ++k) out[i][k] = u[i][k] - c * lap[k];
  }
  for (int j = 0; j < nh; ++j) {
    // Tangential stress tau_a . (S N) with tau_a = e_a + d_a phi e_z.
    for (int a = 0; a < d; ++a) {
      double acc = 0.0;
      for (int p = 0; p < nc; ++p) {
        const double tp = (p == a ? 1.0 : 0.0) + (p == d ? fr.grad_eta[a][j] : 0.0);
        if (tp == 0.0) continue;
        for (int q = 0; q < nc; ++q) acc += tp * 0.5 * (g[p][q][j] + g[q][p][j]) * fr.N[q][j];
      }
      out[a][j] = acc;
    }
    double div = 0.0;
    for (int i = 0; i < nc; ++i) div += g[i][i][j];
    out[d][j] = div;
    // Free slip and no penetration at the bottom.
    const std::size_t k = bot + j;
    for (int a = 0; a < d; ++a) out[a][k] = fr.J[k] * g[a][d][k];
    out[d][k] = u[d][k];
  }
  return out;
}

const Stepper::ModeLU& Stepper::factor(double c) {
  auto it = lu_cache_.find(c);
  if (it != lu_cache_.end()) return it->second;
  const int d = grid_.d(), nc = d + 1, nl = grid_.nl(), nz = nl - 1, nhc = grid_.nhc();
  const RowMatrix& D = grid_.dmat();
  const RowMatrix D2 = D * D;
  const double A = A_, iA2 = 1.0 / (A * A);
  ModeLU lus(nhc);
  for (int m = 0; m < nhc; ++m) {
    double kd2 = 0.0;
    std::vector<double> kd(d);
    for (int a = 0; a < d; ++a) {
      kd[a] = grid_.deriv_wavenumber(a, m);
      kd2 += kd[a] * kd[a];
    }
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nc * nl, nc * nl);
    for (int s = 0; s < nc; ++s)
      for (int l = 1; l < nz; ++l) {
        M(s * nl + l, s * nl + l) += 1.0 + c * kd2;
        for (int q = 0; q < nl; ++q) M(s * nl + l, s * nl + q) -= c * iA2 * D2(l, q);
      }
    for (int a = 0; a < d; ++a) {
      for (int q = 0; q < nl; ++q) {
        M(a * nl, a * nl + q) = 0.5 * D(0, q) / A;
        M(a * nl + nz, a * nl + q) = D(nz, q);
      }
      M(a * nl, d * nl) += -0.5 * kd[a];
      M(d * nl, a * nl) = kd[a];
    }
    for (int q = 0; q < nl; ++q) M(d * nl, d * nl + q) += D(0, q) / A;
    M(d * nl + nz, d * nl + nz) = 1.0;
    lus[m].compute(M);
  }
  return lu_cache_.emplace(c, std::move(lus)).first->second;
}

std::vector<Field> Stepper::precondition(const std::vector<Field>& r, const ModeLU& lu) const {
  const int d = grid_.d(), nc = d + 1, nl = grid_.nl(), nhc = grid_.nhc();
  std::vector<Spectrum> rs(nc), xs(nc);
  for (int i = 0; i < nc; ++i) {
    rs[i] = grid_.forward(r[i]);
    xs[i].assign(rs[i].size(), cplx(0.0, 0.0));
  }
  // The vertical component carries a factor i relative to the horizontal
  // ones, which makes every mode block real.
  auto solve_mode = [&](int m) {
    Eigen::VectorXd re(nc * nl), im(nc * nl);
    for (int s = 0; s < nc; ++s)
      for (int l = 0; l < nl; ++l) {
        const cplx v = rs[s][static_cast<std::size_t>(l) * nhc + m];
        if (s < d) {
          re(s * nl + l) = v.real();
          im(s * nl + l) = v.imag();
        } else {
          re(s * nl + l) = v.imag();
          im(s * nl + l) = -v.real();
        }
      }
    const Eigen::VectorXd xr = lu[m].solve(re), xi = lu[m].solve(im);
    for (int s = 0; s < nc; ++s)
      for (int l = 0; l < nl; ++l) {
        const std::size_t k = static_cast<std::size_t>(l) * nhc + m;
        xs[s][k] = s < d ? cplx(xr(s * nl + l), xi(s * nl + l))
                         : cplx(-xi(s * nl + l), xr(s * nl + l));
      }
  };
#pragma omp parallel for schedule(static)
  for (int m = 0; m < nhc; ++m) solve_mode(m);
  std::vector<Field> out(nc);
  for (int i = 0; i < nc; ++i) out[i] = grid_.inverse(xs[i]);
  return out;
}

std::vector<Field> Stepper::viscous_solve(const std::vector<Field>& rhs, const DiffeoFrame& fr,
                                          double c, const std::vector<Field>* guess) {
  const int d = grid_.d(), nc = d + 1, nh = grid_.nh(), nz = grid_.nl() - 1;
  const std::size_t n = grid_.size();
  std::vector<Field> b = rhs;
  for (int i = 0; i < nc; ++i) {
    std::fill(b[i].begin(), b[i].begin() + nh, 0.0);
    std::fill(b[i].begin() + static_cast<std::ptrdiff_t>(nz) * nh, b[i].end(), 0.0);
  }
  const ModeLU& lu = factor(c);
  const LinOp op = [&](const Vec& in, Vec& out) {
    out = pack(viscous_apply(unpack(in, nc, n), fr, c));
  };
  const LinOp pre = [&](const Vec& in, Vec& out) { out = pack(precondition(unpack(in, nc, n), lu)); };
  Vec x = guess ? pack(*guess) : pack(rhs);
  const KrylovResult kr = gmres(op, pre, pack(b), x, cfg_.viscous_tol, cfg_.viscous_max_iter);
  stats_.viscous_iterations += kr.iterations;
  if (!kr.converged) {
    std::ostringstream os;
    os << "viscous solve did not converge: residual " << kr.residual << " after "
       << kr.iterations << " iterations";
    throw NonConvergence(os.str(), kr.iterations, kr.residual);
  }
  return unpack(x, nc, n);
}

const Stepper::ModeLU& Stepper::factor_poisson() {
  if (!poisson_lu_.empty()) return poisson_lu_;
  const int nl = grid_.nl(), nz = nl - 1, nhc = grid_.nhc();
  const RowMatrix& D = grid_.dmat();
  const RowMatrix D2 = D * D;
  const double iA2 = 1.0 / (A_ * A_);
  poisson_lu_.resize(nhc);
  for (int m = 0; m < nhc; ++m) {
    double kd2 = 0.0;
    for (int a = 0; a < grid_.d(); ++a) kd2 += grid_.deriv_wavenumber(a, m) * grid_.deriv_wavenumber(a, m);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nl, nl);
    M(0, 0) = 1.0;
    for (int l = 1; l < nz; ++l) {
      M(l, l) -= kd2;
      for (int q = 0; q < nl; ++q) M(l, q) += iA2 * D2(l, q);
    }
    for (int q = 0; q < nl; ++q) M(nz, q) = D(nz, q) / A_;
    poisson_lu_[m].compute(M);
  }
  return poisson_lu_;
}

Field Stepper::poisson_solve(const Field& f, const DiffeoFrame& fr) {
  const int nh = grid_.nh(), nl = grid_.nl(), nz = nl - 1, nhc = grid_.nhc();
  const std::size_t n = grid_.size(), bot = static_cast<std::size_t>(nz) * nh;
  const ModeLU& lu = factor_poisson();
  Vec b = f;
  std::fill(b.begin(), b.begin() + nh, 0.0);
  std::fill(b.begin() + static_cast<std::ptrdiff_t>(bot), b.end(), 0.0);
  const LinOp op = [&](const Vec& in, Vec& out) {
    out = laplacian_phi(in, fr, grid_);
    const Field dz = grid_.dz(in);
    for (int j = 0; j < nh; ++j) {
      out[j] = in[j];
      out[bot + j] = dz[bot + j] / fr.J[bot + j];
    }
  };
  const LinOp pre = [&](const Vec& in, Vec& out) {
    const Spectrum rs = grid_.forward(in);
    Spectrum xs(rs.size());
    for (int m = 0; m < nhc; ++m) {
      Eigen::VectorXd re(nl), im(nl);
      for (int l = 0; l < nl; ++l) {
        re(l) = rs[static_cast<std::size_t>(l) * nhc + m].real();
        im(l) = rs[static_cast<std::size_t>(l) * nhc + m].imag();
      }
      const Eigen::VectorXd xr = lu[m].solve(re), xi = lu[m].solve(im);
      for (int l = 0; l < nl; ++l) xs[static_cast<std::size_t>(l) * nhc + m] = cplx(xr(l), xi(l));
    }
    out = grid_.inverse(xs);
  };
  Vec x(n, 0.0);
  const KrylovResult kr = gmres(op, pre, b, x, cfg_.pressure_tol, cfg_.pressure_max_iter);
  stats_.pressure_iterations += kr.iterations;
  if (!kr.converged)
    throw NonConvergence("projection solve did not converge", kr.iterations, kr.residual);
  return x;
}

void Stepper::filter(FlowState& s) const {
  if (filter_.size() == 0) return;
  for (auto& f : s.v) f = apply_matrix(filter_, f, grid_.nh());
}

void Stepper::project(FlowState& s) {
  const std::size_t n = grid_.size();
  const Field psi = poisson_solve(div_phi(s.v, s.frame, grid_), s.frame);
  const auto g = grad_phi(psi, s.frame, grid_);
  for (int i = 0; i < s.frame.nc(); ++i)
    for (std::size_t k = 0; k < n; ++k) s.v[i][k] -= g[i][k];
}

FlowState Stepper::step(const FlowState& s, double dt) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  stats_ = {};
  const double eps = cfg_.eps;
  const double c = kGamma * dt * eps;

  const Tendency t1 = explicit_rhs(s);
  FlowState s2;
  s2.surface = SurfaceState::from_values(grid_, axpy(s.surface.h, kGamma * dt, t1.dh), s.t + kGamma * dt);
  s2.frame = frame_of(s2.surface);
  s2.t = s.t + kGamma * dt;
  s2.eps = eps;
  const auto rhs2 = axpy(s.v, kGamma * dt, t1.dv);
  std::vector<Field> g2;
  if (eps > 0.0) {
    s2.v = viscous_solve(rhs2, s2.frame, c);
    g2 = axpy(s2.v, -1.0, rhs2);
    for (auto& f : g2)
      for (double& x : f) x /= kGamma * dt;
  } else {
    s2.v = rhs2;
  }

  const Tendency t2 = explicit_rhs(s2);
  FlowState out;
  {
    Field h = axpy(s.surface.h, kDelta * dt, t1.dh);
    h = axpy(h, (1.0 - kDelta) * dt, t2.dh);
    out.surface = SurfaceState::from_values(grid_, std::move(h), s.t + dt);
  }
  out.frame = frame_of(out.surface);
  out.t = s.t + dt;
  out.eps = eps;
  auto rhs3 = axpy(s.v, kDelta * dt, t1.dv);
  rhs3 = axpy(rhs3, (1.0 - kDelta) * dt, t2.dv);
  if (filter_.size() != 0)
    for (auto& f : rhs3) f = apply_matrix(filter_, f, grid_.nh());
  if (eps > 0.0) {
    rhs3 = axpy(rhs3, (1.0 - kGamma) * dt, g2);
    out.v = viscous_solve(rhs3, out.frame, c, &s2.v);
  } else {
    out.v = std::move(rhs3);
  }
  check_finite(out, grid_);

  stats_.divergence = divergence_residual(out, grid_);
  if (stats_.divergence > cfg_.div_tol) {
    project(out);
    stats_.cleaned = true;
    stats_.divergence = divergence_residual(out, grid_);
  }
  return out;
}

double Stepper::cfl_limit(const FlowState& s) const {
  const int d = grid_.d(), nh = grid_.nh(), nl = grid_.nl();
  double kmax = 0.0;
  for (int c = 0; c < grid_.nhc(); ++c) kmax = std::max(kmax, std::sqrt(grid_.k2(c)));
  const double omega = std::sqrt(cfg_.gravity * kmax * std::tanh(kmax * grid_.depth()));
  double dt = omega > 0.0 ? cfg_.cfl_wave / omega : std::numeric_limits<double>::infinity();

  const GridSpec& sp = grid_.spec();
  for (int a = 0; a < d; ++a) {
    const double dy = (a == 0 ? sp.lx / sp.nx : sp.ly / sp.ny);
    double vmax = 0.0;
    for (double x : s.v[a]) vmax = std::max(vmax, std::abs(x));
    if (vmax > 0.0) dt = std::min(dt, cfg_.cfl_advect * dy / vmax);
  }
  // Vertical transport speed V_z against the local node spacing.
  Field dh(nh);
  for (int j = 0; j < nh; ++j) {
    double vn = s.v[d][j];
    for (int a = 0; a < d; ++a) vn -= s.v[a][j] * s.frame.grad_eta[a][j];
    dh[j] = vn;
  }
  const Field eta_t = extend_surface(SurfaceState::from_values(grid_, dh), chi_, grid_).eta;
  const auto& z = grid_.z();
  for (int l = 0; l < nl; ++l) {
    double dz = std::numeric_limits<double>::infinity();
    if (l > 0) dz = std::min(dz, z[l - 1] - z[l]);
    if (l + 1 < nl) dz = std::min(dz, z[l] - z[l + 1]);
    for (int j = 0; j < nh; ++j) {
      const std::size_t k = static_cast<std::size_t>(l) * nh + j;
      double vn = s.v[d][k];
      for (int a = 0; a < d; ++a) vn -= s.v[a][k] * s.frame.grad_eta[a][k];
      const double vz = std::abs(vn - eta_t[k]) / s.frame.J[k];
      if (vz > 0.0) dt = std::min(dt, cfg_.cfl_advect * dz / vz);
    }
  }
  return dt;
}

double kinetic_energy(const std::vector<Field>& v, const DiffeoFrame& frame, const Grid& grid) {
  Field f(grid.size(), 0.0);
  for (const auto& c : v)
    for (std::size_t k = 0; k < f.size(); ++k) f[k] += c[k] * c[k];
  for (std::size_t k = 0; k < f.size(); ++k) f[k] *= frame.J[k];
  return grid.integrate(f);
}

double potential_energy(const SurfaceState& h, const Grid& grid, double gravity) {
  Field sq(h.h.size());
  for (std::size_t j = 0; j < sq.size(); ++j) sq[j] = h.h[j] * h.h[j];
  return gravity * grid.integrate_level(sq.data());
}

double dissipation_rate(const std::vector<Field>& v, const DiffeoFrame& frame, const Grid& grid,
                        double eps) {
  if (eps == 0.0) return 0.0;
  const int nc = frame.nc();
  const auto s = strain(velocity_gradient(v, frame, grid), nc);
  Field f(grid.size(), 0.0);
  for (const auto& c : s)
    for (std::size_t k = 0; k < f.size(); ++k) f[k] += c[k] * c[k];
  for (std::size_t k = 0; k < f.size(); ++k) f[k] *= frame.J[k];
  return 4.0 * eps * grid.integrate(f);
}

EnergyLedger energy_audit(const FlowState& s, const EnergyLedger& prev, const Grid& grid,
                          double gravity) {
  EnergyLedger l = prev;
  l.kinetic = kinetic_energy(s.v, s.frame, grid);
  l.potential = potential_energy(s.surface, grid, gravity);
  l.dissipation_rate = dissipation_rate(s.v, s.frame, grid, s.eps);
  if (!prev.started) {
    l.started = true;
    l.initial_total = l.total();
    l.dissipation_integral = 0.0;
  } else {
    l.dissipation_integral += 0.5 * (s.t - prev.t) * (prev.dissipation_rate + l.dissipation_rate);
  }
  l.t = s.t;
  l.residual = l.total() + l.dissipation_integral - l.initial_total;
  return l;
}

double divergence_residual(const FlowState& s, const Grid& grid) {
  return grid.l2(div_phi(s.v, s.frame, grid));
}

void check_finite(const FlowState& s, const Grid& grid) {
  const int nh = grid.nh();
  for (std::size_t i = 0; i < s.v.size(); ++i)
    for (std::size_t k = 0; k < s.v[i].size(); ++k)
      if (!std::isfinite(s.v[i][k])) {
        std::ostringstream os;
        os << "non-finite velocity component " << i << " at level " << k / nh << ", column "
           << k % nh;
        throw BreakdownError(os.str(), static_cast<int>(k / nh), static_cast<int>(k % nh),
                             s.v[i][k]);
      }
  for (int j = 0; j < nh; ++j)
    if (!std::isfinite(s.surface.h[j]))
      throw BreakdownError("non-finite surface elevation at column " + std::to_string(j), 0, j,
                           s.surface.h[j]);
}

FlowState standing_wave(const Stepper& st, double amplitude, double k) {
  const Grid& g = st.grid();
  Field h(g.nh());
  for (int j = 0; j < g.nh(); ++j) h[j] = amplitude * std::cos(k * g.coord(0, j));
  return st.make_state(std::vector<Field>(g.d() + 1, Field(g.size(), 0.0)),
                       SurfaceState::from_values(g, std::move(h)));
}

}  // namespace fsns
