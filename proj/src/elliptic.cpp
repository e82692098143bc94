#include "fsns/elliptic.hpp"

#include <cmath>
#include <sstream>

#include "fsns/error.hpp"
#include "fsns/krylov.hpp"

namespace fsns {

EllipticSolver::EllipticSolver(const Grid& grid, double A, BottomCondition bottom, Exec ex)
    : grid_(grid), A_(A), bottom_(bottom), exec_(ex) {
  if (!(A > 0.0)) throw SetupError("elliptic solver needs A > 0");
  const int nl = grid.nl(), nz = nl - 1;
  first_ = 1;
  last_ = bottom == BottomCondition::dirichlet_zero ? nl - 2 : nl - 1;
  const int nf = last_ - first_ + 1;

  // Products of two gradients (degree nz - 1) and E (degree nz).
  const int mq = (3 * nz) / 2 + 1;
  std::vector<double> xg, wg;
  gauss_legendre(mq, xg, wg);
  q_ = cheb_interp_matrix(nz, xg);
  qt_ = q_.transpose();
  wq_.resize(mq);
  for (int i = 0; i < mq; ++i) wq_[i] = 0.5 * grid.depth() * wg[i];

  const RowMatrix qd = q_ * grid.dmat();
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(nl, nl), stiff = Eigen::MatrixXd::Zero(nl, nl);
  for (int i = 0; i < nl; ++i)
    for (int j = 0; j < nl; ++j) {
      double sm = 0.0, ss = 0.0;
      for (int k = 0; k < mq; ++k) {
        sm += q_(k, i) * wq_[k] * q_(k, j);
        ss += qd(k, i) * wq_[k] * qd(k, j);
      }
      mass(i, j) = sm;
      stiff(i, j) = ss;
    }
  chol_.resize(grid.nhc());
  for (int c = 0; c < grid.nhc(); ++c) {
    double kd2 = 0.0;
    for (int a = 0; a < grid.d(); ++a) kd2 += grid.deriv_wavenumber(a, c) * grid.deriv_wavenumber(a, c);
    Eigen::MatrixXd m(nf, nf);
    for (int i = 0; i < nf; ++i)
      for (int j = 0; j < nf; ++j)
        m(i, j) = grid.cell_area() *
                  (A * kd2 * mass(first_ + i, first_ + j) + stiff(first_ + i, first_ + j) / A);
    chol_[c].compute(m);
    if (chol_[c].info() != Eigen::Success) throw SetupError("flat preconditioner is not SPD");
  }
}

bool EllipticSolver::constrained(int level) const { return level < first_ || level > last_; }

std::vector<Field> EllipticSolver::quadrature_coefficients(const DiffeoFrame& frame) const {
  const int nc = frame.nc();
  std::vector<Field> eq(nc * nc);
  for (int i = 0; i < nc; ++i)
    for (int j = i; j < nc; ++j) {
      eq[i * nc + j] = apply_matrix(q_, frame.E[i * nc + j], grid_.nh(), exec_);
      if (j != i) eq[j * nc + i] = eq[i * nc + j];
    }
  return eq;
}

Field EllipticSolver::apply(const DiffeoFrame& frame, const Field& u) const {
  return apply_q(quadrature_coefficients(frame), u);
}

Field EllipticSolver::apply_q(const std::vector<Field>& eq, const Field& u) const {
  const int d = grid_.d(), nc = d + 1, nh = grid_.nh(), nhc = grid_.nhc(), nl = grid_.nl();
  const int mq = static_cast<int>(wq_.size());
  const std::size_t n = grid_.size();
  std::vector<Field> g = grid_.grad_h(u);
  g.push_back(grid_.dz(u, exec_));
  for (auto& gi : g) gi = apply_matrix(q_, gi, nh, exec_);
  std::vector<Field> flux(nc);
  for (int i = 0; i < nc; ++i) {
    Field fi(static_cast<std::size_t>(mq) * nh);
    for (int l = 0; l < mq; ++l) {
      const double w = wq_[l];
      for (int j = 0; j < nh; ++j) {
        const std::size_t k = static_cast<std::size_t>(l) * nh + j;
        double s = 0.0;
        for (int q = 0; q < nc; ++q) s += eq[i * nc + q][k] * g[q][k];
        fi[k] = w * s;
      }
    }
    flux[i] = apply_matrix(qt_, fi, nh, exec_);
  }
  // -sum_a d_a flux_a assembled in spectral space.
  Spectrum acc(static_cast<std::size_t>(nl) * nhc, cplx(0.0, 0.0));
  for (int a = 0; a < d; ++a) {
    const Spectrum fs = grid_.forward(flux[a]);
    for (int l = 0; l < nl; ++l)
      for (int c = 0; c < nhc; ++c) {
        const std::size_t k = static_cast<std::size_t>(l) * nhc + c;
        acc[k] -= cplx(0.0, grid_.deriv_wavenumber(a, c)) * fs[k];
      }
  }
  Field out = grid_.inverse(acc);
  const Field vz = grid_.dz_t(flux[d], exec_);
  const double ca = grid_.cell_area();
  for (std::size_t k = 0; k < n; ++k) out[k] = ca * (out[k] + vz[k]);
  return out;
}

Field EllipticSolver::load(const Field& f) const {
  const int nh = grid_.nh();
  Field fq = apply_matrix(q_, f, nh, exec_);
  for (std::size_t k = 0; k < fq.size(); ++k) fq[k] *= grid_.cell_area() * wq_[k / nh];
  return apply_matrix(qt_, fq, nh, exec_);
}

Field EllipticSolver::load_divergence(const std::vector<Field>& F) const {
  const int d = grid_.d(), nh = grid_.nh();
  const std::size_t n = grid_.size();
  Field b(n, 0.0);
  for (int a = 0; a <= d; ++a) {
    const Field w = load(F[a]);
    if (a < d) {
      const Field da = grid_.dh(w, a);
      for (std::size_t k = 0; k < n; ++k) b[k] += da[k];
    } else {
      const Field vz = grid_.dz_t(w, exec_);
      for (std::size_t k = 0; k < n; ++k) b[k] -= vz[k];
    }
  }
  (void)nh;
  return b;
}

Field EllipticSolver::precondition(const Field& r) const {
  const int nhc = grid_.nhc();
  const int nf = last_ - first_ + 1;
  Spectrum rs = grid_.forward(r);
  Spectrum xs(rs.size(), cplx(0.0, 0.0));
  auto solve_mode = [&](int c) {
    Eigen::VectorXd re(nf), im(nf);
    for (int i = 0; i < nf; ++i) {
      const cplx v = rs[static_cast<std::size_t>(first_ + i) * nhc + c];
      re(i) = v.real();
      im(i) = v.imag();
    }
    const Eigen::VectorXd xr = chol_[c].solve(re);
    const Eigen::VectorXd xi = chol_[c].solve(im);
    for (int i = 0; i < nf; ++i)
      xs[static_cast<std::size_t>(first_ + i) * nhc + c] = cplx(xr(i), xi(i));
  };
  if (exec_ == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int c = 0; c < nhc; ++c) solve_mode(c);
  } else {
    for (int c = 0; c < nhc; ++c) solve_mode(c);
  }
  return grid_.inverse(xs);
}

namespace {

void mask_levels(Field& f, const EllipticSolver& s, const Grid& grid) {
  const int nh = grid.nh();
  for (int l = 0; l < grid.nl(); ++l)
    if (s.constrained(l))
      std::fill(f.begin() + static_cast<std::ptrdiff_t>(l) * nh,
                f.begin() + static_cast<std::ptrdiff_t>(l + 1) * nh, 0.0);
}

}  // namespace

EllipticSolution EllipticSolver::solve(const EllipticProblem& p, double tol, int max_iter,
                                       const Field* guess) const {
  if (!p.frame) throw SetupError("elliptic problem has no frame");
  if (p.bottom != bottom_) throw SetupError("bottom condition differs from the solver's");
  if (p.rhs_divergence.has_value() == p.rhs_plain.has_value())
    throw SetupError("exactly one right-hand side variant must be set");
  if (!(tol > 0.0)) throw SetupError("tolerance must be positive");
  const DiffeoFrame& frame = *p.frame;
  const int d = grid_.d(), nc = d + 1, nh = grid_.nh(), nl = grid_.nl();
  const std::size_t n = grid_.size();
  if (frame.J.size() != n || frame.d != d) throw ShapeError("frame does not match the grid");
  if (!p.top_data.empty() && static_cast<int>(p.top_data.size()) != nh)
    throw ShapeError("top data length != nh");
  if (!(min_eigen_E(frame) > 0.0)) throw SetupError("E is not positive definite");

  Field b;
  if (p.rhs_plain) {
    if (p.rhs_plain->size() != n) throw ShapeError("rhs size mismatch");
    b = load(*p.rhs_plain);
  } else {
    const auto& F = *p.rhs_divergence;
    if (static_cast<int>(F.size()) != nc) throw ShapeError("divergence rhs needs d + 1 components");
    for (const auto& c : F)
      if (c.size() != n) throw ShapeError("rhs size mismatch");
    b = load_divergence(F);
  }
  const std::vector<Field> eq = quadrature_coefficients(frame);

  Field lift(n, 0.0);
  if (!p.top_data.empty()) std::copy(p.top_data.begin(), p.top_data.end(), lift.begin());
  {
    const Field kl = apply_q(eq, lift);
    for (std::size_t k = 0; k < n; ++k) b[k] -= kl[k];
  }
  mask_levels(b, *this, grid_);

  Field x(n, 0.0);
  if (guess && guess->size() == n) {
    for (std::size_t k = 0; k < n; ++k) x[k] = (*guess)[k] - lift[k];
    mask_levels(x, *this, grid_);
  }
  const LinOp op = [&](const Vec& in, Vec& out) {
    out = apply_q(eq, in);
    mask_levels(out, *this, grid_);
  };
  const LinOp pre = [&](const Vec& in, Vec& out) { out = precondition(in); };
  const KrylovResult kr = pcg(op, pre, b, x, tol, max_iter);
  if (!kr.converged) {
    std::ostringstream os;
    os << "elliptic solve did not converge: residual " << kr.residual << " after "
       << kr.iterations << " iterations";
    throw NonConvergence(os.str(), kr.iterations, kr.residual);
  }
  for (std::size_t k = 0; k < n; ++k) x[k] += lift[k];
  return {std::move(x), {kr.iterations, kr.residual}};
}

EllipticSolution solve_dirichlet(const EllipticProblem& p, const Grid& grid, double tol,
                                 int max_iter) {
  if (!p.frame) throw SetupError("elliptic problem has no frame");
  EllipticSolver s(grid, p.frame->A, p.bottom);
  return s.solve(p, tol, max_iter);
}

std::vector<Field> velocity_gradient(const std::vector<Field>& v, const DiffeoFrame& frame,
                                     const Grid& grid) {
  const int nc = frame.nc();
  if (static_cast<int>(v.size()) != nc) throw ShapeError("velocity needs d + 1 components");
  std::vector<Field> g(nc * nc);
  for (int i = 0; i < nc; ++i) {
    auto gi = grad_phi(v[i], frame, grid);
    for (int j = 0; j < nc; ++j) g[i * nc + j] = std::move(gi[j]);
  }
  return g;
}

std::vector<Field> strain(const std::vector<Field>& grad, int nc) {
  std::vector<Field> s(nc * nc);
  const std::size_t n = grad[0].size();
  for (int i = 0; i < nc; ++i)
    for (int j = 0; j < nc; ++j) {
      Field f(n);
      for (std::size_t k = 0; k < n; ++k) f[k] = 0.5 * (grad[i * nc + j][k] + grad[j * nc + i][k]);
      s[i * nc + j] = std::move(f);
    }
  return s;
}

Field normal_stress_top(const std::vector<Field>& s, const DiffeoFrame& frame, const Grid& grid) {
  const int nc = frame.nc();
  Field out(grid.nh());
  for (int j = 0; j < grid.nh(); ++j) {
    double acc = 0.0;
    for (int a = 0; a < nc; ++a)
      for (int b = 0; b < nc; ++b) acc += frame.n[a][j] * s[a * nc + b][j] * frame.n[b][j];
    out[j] = acc;
  }
  return out;
}

Field euler_pressure_source(const std::vector<Field>& grad, const DiffeoFrame& frame, int nc) {
  const std::size_t n = frame.J.size();
  Field f(n);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (int i = 0; i < nc; ++i)
      for (int j = 0; j < nc; ++j) s += grad[i * nc + j][k] * grad[j * nc + i][k];
    f[k] = frame.J[k] * s;
  }
  return f;
}

Field taylor_coefficient(const Field& qE, const DiffeoFrame& frame, const Grid& grid,
                         double gravity) {
  const int nh = grid.nh(), nl = grid.nl();
  const auto& dm = grid.dmat();
  Field out(nh);
  for (int j = 0; j < nh; ++j) {
    double s = 0.0;
    for (int l = 0; l < nl; ++l) s += dm(0, l) * qE[static_cast<std::size_t>(l) * nh + j];
    out[j] = gravity - s / frame.J[j];
  }
  return out;
}

Field pressure_euler(const std::vector<Field>& v, const SurfaceState& h,
                     const DiffeoFrame& frame, const Grid& grid, const PressureOptions& opt,
                     Field* taylor_coeff, SolveReport* report) {
  const int nc = frame.nc();
  EllipticProblem p;
  p.frame = &frame;
  p.rhs_plain = euler_pressure_source(velocity_gradient(v, frame, grid), frame, nc);
  p.top_data.resize(grid.nh());
  for (int j = 0; j < grid.nh(); ++j) p.top_data[j] = opt.gravity * h.h[j];
  p.bottom = opt.bottom;
  auto sol = solve_dirichlet(p, grid, opt.tol, opt.max_iter);
  if (taylor_coeff) *taylor_coeff = taylor_coefficient(sol.rho, frame, grid, opt.gravity);
  if (report) *report = sol.report;
  return std::move(sol.rho);
}

Field pressure_ns(const std::vector<Field>& v, const DiffeoFrame& frame, const Grid& grid,
                  double eps, const PressureOptions& opt, SolveReport* report) {
  if (eps == 0.0) {
    if (report) *report = {};
    return Field(grid.size(), 0.0);
  }
  const int nc = frame.nc();
  const auto s = strain(velocity_gradient(v, frame, grid), nc);
  Field top = normal_stress_top(s, frame, grid);
  for (double& x : top) x *= 2.0 * eps;
  EllipticProblem p;
  p.frame = &frame;
  p.rhs_plain = Field(grid.size(), 0.0);
  p.top_data = std::move(top);
  p.bottom = opt.bottom;
  auto sol = solve_dirichlet(p, grid, opt.tol, opt.max_iter);
  if (report) *report = sol.report;
  return std::move(sol.rho);
}

PressurePair pressure_pair(const std::vector<Field>& v, const SurfaceState& h,
                           const DiffeoFrame& frame, const Grid& grid, double eps,
                           const PressureOptions& opt) {
  PressurePair pp;
  pp.qE = pressure_euler(v, h, frame, grid, opt, &pp.taylor_coeff, &pp.reportE);
  pp.qNS = pressure_ns(v, frame, grid, eps, opt, &pp.reportNS);
  return pp;
}

}  // namespace fsns
