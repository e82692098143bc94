#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fsns/diagnostics.hpp"
#include "fsns/error.hpp"
#include "helpers.hpp"

using namespace fsns;
using namespace fsns::test;

namespace {

const double kPi = std::numbers::pi;

// Surface a cos(y / 2) on a 4 pi periodic strip of depth 2: the extension
// sits on the plateau of the cutoff, so eta = h and d_z phi = A exactly.
struct Plateau {
  Grid grid{{.d = 1, .nx = 32, .nz = 24, .lx = 4 * kPi, .depth = 2.0}};
  double a = 0.1;
  double A = 1.0;
  FlowState state;
  Plateau() {
    const Field h = sample_surface(grid, [this](double y) { return a * std::cos(0.5 * y); });
    state.surface = SurfaceState::from_values(grid, h);
    state.frame = assemble_frame(state.surface, A, CutoffProfile::smooth_step(), grid);
    state.v = {sample(grid, [](double y, double z) { return std::sin(0.5 * y) * (z * z * z + z); }),
               sample(grid, [](double y, double z) { return std::cos(0.5 * y) * z * z; })};
  }
};

FlowState rest_state(const Grid& g) {
  FlowState s;
  s.surface = SurfaceState::from_values(g, Field(g.nh(), 0.0));
  s.frame = flat_frame(g, 1.0);
  s.v = std::vector<Field>(g.d() + 1, Field(g.size(), 0.0));
  return s;
}

}  // namespace

TEST_CASE("good unknown of order zero is the velocity") {
  Plateau p;
  const GoodUnknown g = good_unknown(p.state, 3, p.grid);
  REQUIRE(g.alpha.front().order() == 0);
  for (int i = 0; i < 2; ++i) CHECK(g.V[0][i] == p.state.v[i]);
  CHECK(g.alpha.size() == multi_indices(1, 3).size());
}

TEST_CASE("good unknown on a flat surface is the conormal family") {
  Grid g({.d = 1, .nx = 16, .nz = 12, .lx = 2 * kPi, .depth = 2.0});
  FlowState s = rest_state(g);
  s.v = {sample(g, [](double y, double z) { return std::sin(y) * std::exp(z); }),
         sample(g, [](double y, double z) { return std::cos(2 * y) * z; })};
  const GoodUnknown gu = good_unknown(s, 3, g);
  for (int i = 0; i < 2; ++i) {
    const auto fam = conormal_family(s.v[i], 3, g);
    for (std::size_t k = 0; k < gu.alpha.size(); ++k) CHECK(gu.V[k][i] == fam[k]);
  }
}

TEST_CASE("good unknown with a vertical conormal factor vanishes on the surface") {
  Plateau p;
  const GoodUnknown g = good_unknown(p.state, 3, p.grid);
  for (std::size_t k = 0; k < g.alpha.size(); ++k) {
    if (g.alpha[k].a3 == 0) continue;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < p.grid.nh(); ++j) CHECK(g.V[k][i][j] == 0.0);
  }
}

TEST_CASE("good unknown matches a closed-form single-mode evaluation") {
  // v0 = sin(y/2) (z^3 + z), eta = a cos(y/2), J = A; Z3 = z / (1 - z) d_z.
  Plateau p;
  const GoodUnknown g = good_unknown(p.state, 2, p.grid);
  const double a = p.a, A = p.A;
  auto oracle = [&](const ConormalMultiIndex& al, double y, double z) {
    const double w = z / (1.0 - z);
    const double s = std::sin(0.5 * y), c = std::cos(0.5 * y);
    const double dzv = s * (3 * z * z + 1) / A;
    // Z^alpha eta has no vertical factor: eta is independent of z.
    const double zeta = al.a3 > 0 ? 0.0 : a * (al.a1 == 0 ? c : al.a1 == 1 ? -0.5 * s : -0.25 * c);
    double zv = 0.0;
    const double p0 = z * z * z + z, p1 = 3 * z * z + 1;
    const double ys = al.a1 == 0 ? s : al.a1 == 1 ? 0.5 * c : -0.25 * s;
    if (al.a3 == 0) zv = ys * p0;
    else if (al.a3 == 1) zv = ys * w * p1;
    else {
      // Z3 Z3 p0 = w (w' p1 + w 6 z), w' = 1 / (1 - z)^2.
      const double dw = 1.0 / ((1.0 - z) * (1.0 - z));
      zv = ys * w * (dw * p1 + w * 6 * z);
    }
    // V^0 = v by definition.
    return al.order() == 0 ? zv : zv - dzv * zeta;
  };
  double err = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < g.alpha.size(); ++k)
    for (int l = 0; l < p.grid.nl(); ++l)
      for (int j = 0; j < p.grid.nh(); ++j) {
        const double y = p.grid.coord(0, j), z = p.grid.z()[l];
        const double o = oracle(g.alpha[k], y, z);
        const double e = std::abs(g.V[k][0][static_cast<std::size_t>(l) * p.grid.nh() + j] - o);
        err = std::max(err, e);
        scale = std::max(scale, std::abs(o));
      }
  MESSAGE("good unknown oracle error " << err << " at scale " << scale);
  // Z3 Z3 differentiates a rational function by collocation.
  CHECK(err < 1e-8 * scale);
}

TEST_CASE("tangential stress vanishes for trivial fields") {
  Grid g({.d = 1, .nx = 16, .nz = 12, .lx = 2 * kPi, .depth = 2.0});
  FlowState s = rest_state(g);
  for (const auto& c : s_n(s, g)) CHECK(max_abs(c) == 0.0);
  s.v[0].assign(g.size(), 2.5);
  for (const auto& c : s_n(s, g)) CHECK(max_abs(c) < 1e-13);
}

TEST_CASE("tangential stress of a viscous step vanishes on the surface") {
  Grid g({.d = 1, .nx = 32, .nz = 32, .lx = 2 * kPi, .depth = 2.0});
  const auto chi = CutoffProfile::smooth_step();
  const Field h = sample_surface(g, [](double y) { return 0.02 * std::cos(y); });
  DynamicsConfig cfg;
  cfg.eps = 0.05;
  cfg.div_tol = 1e300;
  Stepper st(g, chi, choose_A(SurfaceState::from_values(g, h), chi, g), cfg);
  FlowState s = standing_wave(st, 0.02, 1.0);
  for (int i = 0; i < 5; ++i) s = st.step(s, 0.01);
  const auto sn = s_n(s, g);
  double interior = 0.0;
  for (const auto& c : sn) interior = std::max(interior, max_abs(c));
  MESSAGE("surface " << surface_max(sn, g) << " interior " << interior);
  CHECK(surface_max(sn, g) < 1e-10 * interior);
}

TEST_CASE("vorticity of a potential flow is at rounding") {
  // v = grad of cos(y) cosh(z + H) in the flat frame.
  Grid g({.d = 1, .nx = 16, .nz = 32, .lx = 2 * kPi, .depth = 2.0});
  FlowState s = rest_state(g);
  s.v = {sample(g, [](double y, double z) { return -std::sin(y) * std::cosh(z + 2.0); }),
         sample(g, [](double y, double z) { return std::cos(y) * std::sinh(z + 2.0); })};
  const Vorticity w = vorticity(s, g);
  CHECK(max_abs(w.omega[0]) < 1e-11);
  // Harmonic potential: the divergence identity holds too.
  CHECK(max_abs(w.identity_residual) < 1e-11);
}

TEST_CASE("vorticity of a shear profile in a curved frame") {
  // v = (f(z), 0): omega = -d_z^phi f = -f'(z) / J.
  Grid g({.d = 1, .nx = 32, .nz = 24, .lx = 2 * kPi, .depth = 2.0});
  const Field h = sample_surface(g, [](double y) { return 0.1 * std::cos(y) + 0.05 * std::sin(2 * y); });
  FlowState s;
  s.surface = SurfaceState::from_values(g, h);
  const auto chi = CutoffProfile::smooth_step();
  s.frame = assemble_frame(s.surface, choose_A(s.surface, chi, g), chi, g);
  s.v = {sample(g, [](double, double z) { return z * z * z - z; }), Field(g.size(), 0.0)};
  const Vorticity w = vorticity(s, g);
  double err = 0.0;
  for (int l = 0; l < g.nl(); ++l)
    for (int j = 0; j < g.nh(); ++j) {
      const std::size_t k = static_cast<std::size_t>(l) * g.nh() + j;
      const double z = g.z()[l];
      err = std::max(err, std::abs(w.omega[0][k] + (3 * z * z - 1) / s.frame.J[k]));
    }
  CHECK(err < 1e-12);
}

TEST_CASE("normal derivative identity equals J times the divergence") {
  Plateau p;
  const Vorticity w = vorticity(p.state, p.grid);
  const Field div = div_phi(p.state.v, p.state.frame, p.grid);
  double err = 0.0;
  for (std::size_t k = 0; k < div.size(); ++k)
    err = std::max(err, std::abs(w.identity_residual[k] - p.state.frame.J[k] * div[k]));
  CHECK(err < 1e-12 * max_abs(div));
}

TEST_CASE("normal derivative identity converges for projected states") {
  // Project the same smooth field at two vertical resolutions.
  std::vector<double> res;
  for (int nz : {16, 32}) {
    Grid g({.d = 1, .nx = 32, .nz = nz, .lx = 2 * kPi, .depth = 2.0});
    const auto chi = CutoffProfile::smooth_step();
    const Field h = sample_surface(g, [](double y) { return 0.05 * std::cos(y); });
    Stepper st(g, chi, choose_A(SurfaceState::from_values(g, h), chi, g), {});
    FlowState s = standing_wave(st, 0.05, 1.0);
    s.v = {sample(g, [](double y, double z) { return std::sin(y) * std::cos(z); }),
           sample(g, [](double y, double z) { return std::cos(y) * z * (z + 2.0); })};
    st.project(s);
    const Vorticity w = vorticity(s, g);
    res.push_back(g.l2(w.identity_residual));
  }
  MESSAGE("identity residual " << res[0] << " -> " << res[1]);
  CHECK(res[1] < res[0] / 4.0);
}

TEST_CASE("taylor coefficient") {
  Grid g({.d = 1, .nx = 32, .nz = 24, .lx = 2 * kPi, .depth = 2.0});
  const FlowState rest = rest_state(g);
  CHECK(taylor_min(rest, g, 9.81) == doctest::Approx(9.81).epsilon(1e-12));

  const auto chi = CutoffProfile::smooth_step();
  const Field h = sample_surface(g, [](double y) { return 0.02 * std::cos(y); });
  Stepper st(g, chi, choose_A(SurfaceState::from_values(g, h), chi, g), {});
  std::vector<FlowState> states = {standing_wave(st, 0.02, 1.0)};
  for (int i = 0; i < 20; ++i) states.push_back(st.step(states.back(), 0.02));
  const auto series = taylor_series(states, g, 9.81);
  REQUIRE(series.size() == states.size());
  for (double x : series) CHECK(x >= 9.81 / 2);
}

TEST_CASE("layer width") {
  Grid g({.d = 1, .nx = 16, .nz = 64, .lx = 2 * kPi, .depth = 2.0});
  FlowState v0 = rest_state(g);
  v0.v[0] = sample(g, [](double y, double z) { return std::sin(y) * (1 + z); });
  CHECK_FALSE(layer_width(v0, v0, g).has_value());
  for (double eps : {1e-2, 1e-3}) {
    FlowState ve = v0;
    const double s = std::sqrt(eps);
    for (int l = 0; l < g.nl(); ++l)
      for (int j = 0; j < g.nh(); ++j)
        ve.v[0][static_cast<std::size_t>(l) * g.nh() + j] += s * std::exp(g.z()[l] / s);
    const auto w = layer_width(ve, v0, g);
    REQUIRE(w.has_value());
    CHECK(*w == doctest::Approx(s).epsilon(1e-6));
  }
}

TEST_CASE("monitor row of the rest state") {
  Grid g({.d = 1, .nx = 16, .nz = 16, .lx = 2 * kPi, .depth = 2.0});
  FlowState s = rest_state(g);
  s.eps = 0.01;
  const MonitorRow r = monitor(s, g, {}, EnergyLedger{}, &s);
  CHECK(r.Qm_total == 0.0);
  CHECK(r.taylor_min == doctest::Approx(9.81));
  CHECK_FALSE(r.layer_width.has_value());
  const std::string row = monitor_csv_row(r);
  CHECK(std::count(row.begin(), row.end(), ',') == 11);
  CHECK(row.back() == ',');
  CHECK(monitor_csv_header().rfind("t,eps,Qm_total", 0) == 0);
}

TEST_CASE("monitor functional adds its pieces") {
  Plateau p;
  p.state.eps = 0.04;
  const MonitorRow r = monitor(p.state, p.grid, {.m = 4}, EnergyLedger{});
  const double sum = r.h_m * r.h_m + r.sqrt_eps_h_mhalf * r.sqrt_eps_h_mhalf +
                     r.Vm_norm * r.Vm_norm + r.Sn_m2 * r.Sn_m2 + r.Sn_1inf * r.Sn_1inf +
                     r.sqrt_eps_dzSn_inf * r.sqrt_eps_dzSn_inf;
  CHECK(r.Qm_total == doctest::Approx(sum).epsilon(1e-14));
  CHECK(r.h_m == doctest::Approx(boundary_norm(p.state.surface, 4, p.grid)));
  // Higher order monitors are larger.
  const MonitorRow r6 = monitor(p.state, p.grid, {.m = 6}, EnergyLedger{});
  CHECK(r6.Qm_total > r.Qm_total);
  CHECK_THROWS_AS(monitor(p.state, p.grid, {.m = 1}, EnergyLedger{}), DomainError);
}
