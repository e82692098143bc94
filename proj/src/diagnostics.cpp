#include "fsns/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "fsns/csv.hpp"
#include "fsns/elliptic.hpp"
#include "fsns/error.hpp"

namespace fsns {

GoodUnknown good_unknown(const FlowState& s, int m, const Grid& grid) {
  if (m < 0) throw DomainError("good_unknown: negative order");
  const int nc = s.frame.nc();
  GoodUnknown g;
  g.alpha = multi_indices(grid.d(), m);
  const auto zeta = conormal_family(s.frame.eta, m, grid);
  std::vector<std::vector<Field>> zv(nc);
  std::vector<Field> dzv(nc);
  for (int i = 0; i < nc; ++i) {
    zv[i] = conormal_family(s.v[i], m, grid);
    dzv[i] = apply_dphi(s.v[i], s.frame.d, s.frame, grid);
  }
  g.V.resize(g.alpha.size());
  for (std::size_t k = 0; k < g.alpha.size(); ++k) {
    g.V[k].resize(nc);
    for (int i = 0; i < nc; ++i) {
      if (g.alpha[k].order() == 0) {
        g.V[k][i] = s.v[i];
        continue;
      }
      Field f = zv[i][k];
      for (std::size_t n = 0; n < f.size(); ++n) f[n] -= dzv[i][n] * zeta[k][n];
      g.V[k][i] = std::move(f);
    }
  }
  return g;
}

double good_unknown_norm(const GoodUnknown& g, const Grid& grid) {
  double s = 0.0;
  for (const auto& va : g.V)
    for (const auto& c : va) s += grid.dot(c, c);
  return std::sqrt(s);
}

std::vector<Field> s_n(const FlowState& s, const Grid& grid) {
  const int nc = s.frame.nc();
  const auto S = strain(velocity_gradient(s.v, s.frame, grid), nc);
  const std::size_t n = grid.size();
  std::vector<Field> out(nc, Field(n));
  std::vector<double> sn(nc);
  for (std::size_t k = 0; k < n; ++k) {
    double nn = 0.0;
    for (int a = 0; a < nc; ++a) {
      sn[a] = 0.0;
      for (int b = 0; b < nc; ++b) sn[a] += S[a * nc + b][k] * s.frame.n[b][k];
      nn += sn[a] * s.frame.n[a][k];
    }
    for (int a = 0; a < nc; ++a) out[a][k] = sn[a] - nn * s.frame.n[a][k];
  }
  return out;
}

double surface_max(const std::vector<Field>& f, const Grid& grid) {
  double m = 0.0;
  for (const auto& c : f)
    for (int j = 0; j < grid.nh(); ++j) m = std::max(m, std::abs(c[j]));
  return m;
}

Vorticity vorticity(const FlowState& s, const Grid& grid) {
  const int d = s.frame.d, nc = d + 1;
  const auto g = velocity_gradient(s.v, s.frame, grid);  // d_j v_i at i * nc + j
  const std::size_t n = grid.size();
  Vorticity w;
  auto curl = [&](int i, int j) {
    Field f(n);
    for (std::size_t k = 0; k < n; ++k) f[k] = g[j * nc + i][k] - g[i * nc + j][k];
    return f;
  };
  if (d == 1) {
    w.omega.push_back(curl(0, 1));
  } else {
    w.omega.push_back(curl(1, 2));
    w.omega.push_back(curl(2, 0));
    w.omega.push_back(curl(0, 1));
  }
  w.identity_residual.assign(n, 0.0);
  for (int i = 0; i < nc; ++i) {
    const Field dz = grid.dz(s.v[i]);
    for (std::size_t k = 0; k < n; ++k) w.identity_residual[k] += dz[k] * s.frame.N[i][k];
  }
  for (int a = 0; a < d; ++a) {
    const Field da = grid.dh(s.v[a], a);
    for (std::size_t k = 0; k < n; ++k) w.identity_residual[k] += s.frame.J[k] * da[k];
  }
  return w;
}

double taylor_min(const FlowState& s, const Grid& grid, double gravity) {
  PressureOptions opt;
  opt.gravity = gravity;
  opt.bottom = BottomCondition::neumann_zero;
  opt.max_iter = 300;
  Field tc;
  pressure_euler(s.v, s.surface, s.frame, grid, opt, &tc);
  return *std::min_element(tc.begin(), tc.end());
}

std::vector<double> taylor_series(const std::vector<FlowState>& states, const Grid& grid,
                                  double gravity) {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(taylor_min(s, grid, gravity));
  return out;
}

std::optional<double> layer_width(const FlowState& ve, const FlowState& v0, const Grid& grid) {
  if (ve.v.size() != v0.v.size() || ve.v[0].size() != v0.v[0].size())
    throw ShapeError("layer_width: states on different grids");
  const int d = grid.d(), nh = grid.nh(), nl = grid.nl();
  std::vector<Field> dz(d);
  double scale = 0.0;
  for (int a = 0; a < d; ++a) {
    Field diff(grid.size());
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = ve.v[a][k] - v0.v[a][k];
    dz[a] = grid.dz(diff);
    for (double x : grid.dz(v0.v[a])) scale = std::max(scale, std::abs(x));
  }
  std::vector<double> p(nl, 0.0);
  for (int l = 0; l < nl; ++l) {
    for (int j = 0; j < nh; ++j) {
      double s = 0.0;
      for (int a = 0; a < d; ++a) s += dz[a][static_cast<std::size_t>(l) * nh + j] *
                                       dz[a][static_cast<std::size_t>(l) * nh + j];
      p[l] += std::sqrt(s);
    }
    p[l] /= nh;
  }
  if (!(p[0] > 1e-12 * std::max(1.0, scale))) return std::nullopt;
  const double target = p[0] / std::exp(1.0);
  const auto& z = grid.z();
  for (int l = 1; l < nl; ++l) {
    if (p[l] > target) continue;
    // log p is linear in z between the bracketing levels.
    const double a = std::log(p[l - 1]), b = std::log(std::max(p[l], 1e-300));
    const double t = (a - std::log(target)) / (a - b);
    return -(z[l - 1] + t * (z[l] - z[l - 1]));
  }
  return std::nullopt;
}

MonitorRow monitor(const FlowState& s, const Grid& grid, const MonitorOptions& opt,
                   const EnergyLedger& ledger, const FlowState* reference) {
  if (opt.m < 2) throw DomainError("monitor: order must be at least 2");
  MonitorRow r;
  r.t = s.t;
  r.eps = s.eps;
  const double eps = s.eps;
  r.Vm_norm = good_unknown_norm(good_unknown(s, opt.m, grid), grid);
  r.h_m = boundary_norm(s.surface, opt.m, grid);
  r.sqrt_eps_h_mhalf = std::sqrt(eps) * boundary_norm(s.surface, opt.m + 0.5, grid);
  const auto sn = s_n(s, grid);
  r.Sn_m2 = std::sqrt(conormal_norm_sq(sn, opt.m - 2, grid));
  double dz_inf = 0.0;
  for (const auto& c : sn) {
    r.Sn_1inf = std::max(r.Sn_1inf, conormal_sup_norm(c, 1, grid));
    for (double x : grid.dz(c)) dz_inf = std::max(dz_inf, std::abs(x));
  }
  r.sqrt_eps_dzSn_inf = std::sqrt(eps) * dz_inf;
  r.Qm_total = r.h_m * r.h_m + r.sqrt_eps_h_mhalf * r.sqrt_eps_h_mhalf + r.Vm_norm * r.Vm_norm +
               r.Sn_m2 * r.Sn_m2 + r.Sn_1inf * r.Sn_1inf +
               r.sqrt_eps_dzSn_inf * r.sqrt_eps_dzSn_inf;
  r.taylor_min = taylor_min(s, grid, opt.gravity);
  r.energy_residual = ledger.relative_residual();
  r.div_residual = divergence_residual(s, grid);
  if (reference) r.layer_width = layer_width(s, *reference, grid);
  std::vector<Field> dzv;
  for (const auto& c : s.v) dzv.push_back(grid.dz(c));
  r.dzv_m1 = std::sqrt(conormal_norm_sq(dzv, opt.m - 1, grid));
  return r;
}

std::string monitor_csv_header() {
  return "t,eps,Qm_total,Vm_norm,h_m,sqrt_eps_h_mhalf,Sn_m2,Sn_1inf,taylor_min,energy_residual,"
         "div_residual,layer_width";
}

std::string monitor_csv_row(const MonitorRow& r) {
  return csv_join({fmt_double(r.t), fmt_double(r.eps), fmt_double(r.Qm_total),
                   fmt_double(r.Vm_norm), fmt_double(r.h_m), fmt_double(r.sqrt_eps_h_mhalf),
                   fmt_double(r.Sn_m2), fmt_double(r.Sn_1inf), fmt_double(r.taylor_min),
                   fmt_double(r.energy_residual), fmt_double(r.div_residual),
                   r.layer_width ? fmt_double(*r.layer_width) : std::string()});
}

}  // namespace fsns
