#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fsns/dynamics.hpp"
#include "fsns/error.hpp"
#include "helpers.hpp"

using namespace fsns;
using namespace fsns::test;

namespace {

const double kPi = std::numbers::pi;
const double kG = 9.81;

struct Setup {
  Grid grid;
  Stepper stepper;
  Setup(int nx, int nz, double eps, double amp, double k, DynamicsConfig cfg = {})
      : grid({.d = 1, .nx = nx, .nz = nz, .lx = 2 * kPi, .depth = 2.0}),
        stepper(grid, CutoffProfile::smooth_step(), a_for(grid, amp, k), with_eps(cfg, eps)) {}

  static DynamicsConfig with_eps(DynamicsConfig c, double eps) {
    c.eps = eps;
    return c;
  }
  static double a_for(const Grid& g, double amp, double k) {
    const Field h = sample_surface(g, [&](double y) { return amp * std::cos(k * y); });
    return choose_A(SurfaceState::from_values(g, h), CutoffProfile::smooth_step(), g);
  }
};

// Cosine coefficient of h at wavenumber k.
double mode_amplitude(const Grid& g, const Field& h, double k) {
  double s = 0.0;
  for (int j = 0; j < g.nh(); ++j) s += h[j] * std::cos(k * g.coord(0, j));
  return 2.0 * s / g.nh();
}

double omega(double k, double H) { return std::sqrt(kG * k * std::tanh(k * H)); }

// Final relative energy residual of a standing-wave run.
double energy_residual(Setup& s, double amp, double k, double dt, double T) {
  FlowState st = standing_wave(s.stepper, amp, k);
  EnergyLedger led = energy_audit(st, {}, s.grid, kG);
  const int n = static_cast<int>(std::lround(T / dt));
  for (int i = 0; i < n; ++i) {
    st = s.stepper.step(st, dt);
    led = energy_audit(st, led, s.grid, kG);
  }
  return led.relative_residual();
}

}  // namespace

TEST_CASE("rest state stays at rest") {
  Setup s(16, 12, 0.01, 0.0, 1.0);
  FlowState st = standing_wave(s.stepper, 0.0, 1.0);
  EnergyLedger led = energy_audit(st, {}, s.grid, kG);
  for (int i = 0; i < 5; ++i) {
    st = s.stepper.step(st, 0.01);
    led = energy_audit(st, led, s.grid, kG);
  }
  CHECK(max_abs(st.surface.h) == 0.0);
  for (const auto& c : st.v) CHECK(max_abs(c) == 0.0);
  CHECK(led.residual == 0.0);
  CHECK(st.t == doctest::Approx(0.05));
}

TEST_CASE("linear standing wave follows the dispersion relation") {
  // Zero crossings of a cos(omega t) sit at (2n + 1) pi / (2 omega).
  const double k = 2.0, amp = 1e-3, H = 2.0;
  Setup s(32, 24, 0.0, amp, k);
  FlowState st = standing_wave(s.stepper, amp, k);
  const double dt = 0.01;
  std::vector<double> crossings;
  double prev = mode_amplitude(s.grid, st.surface.h, k);
  while (st.t < 1.6) {
    st = s.stepper.step(st, dt);
    const double cur = mode_amplitude(s.grid, st.surface.h, k);
    if ((prev > 0.0) != (cur > 0.0)) crossings.push_back(st.t - dt * cur / (cur - prev));
    prev = cur;
  }
  REQUIRE(crossings.size() >= 2);
  const double period = 2.0 * (crossings[1] - crossings[0]);
  const double expected = 2.0 * kPi / omega(k, H);
  MESSAGE("period " << period << " vs " << expected);
  CHECK(std::abs(period - expected) / expected < 2e-3);
  CHECK(std::abs(crossings[0] - 0.25 * expected) / expected < 2e-3);
}

TEST_CASE("viscosity damps the wave at the linear rate") {
  // Weakly damped deep-water waves lose energy at rate 4 eps k^2.
  const double k = 2.0, amp = 1e-3, eps = 0.01;
  Setup s(32, 32, eps, amp, k);
  FlowState st = standing_wave(s.stepper, amp, k);
  EnergyLedger led = energy_audit(st, {}, s.grid, kG);
  const double e0 = led.total();
  double prev_total = e0 + 1.0;
  bool monotone = true;
  const double T = 2.0 * kPi / omega(k, 2.0);
  const double dt = T / 200.0;
  for (int i = 0; i < 200; ++i) {
    st = s.stepper.step(st, dt);
    led = energy_audit(st, led, s.grid, kG);
    const double balanced = led.total() + led.dissipation_integral;
    monotone = monotone && led.total() <= prev_total;
    prev_total = led.total();
    CHECK(balanced == doctest::Approx(e0).epsilon(1e-5));
  }
  CHECK(monotone);
  const double expected = std::exp(-4.0 * eps * k * k * st.t);
  MESSAGE("energy ratio over one period " << led.total() / e0 << " vs " << expected);
  CHECK(led.total() / e0 == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("energy residual converges at second order for the viscous wave") {
  Setup s(32, 32, 0.01, 1e-3, 2.0);
  const double r1 = energy_residual(s, 1e-3, 2.0, 0.0025, 0.4);
  const double r2 = energy_residual(s, 1e-3, 2.0, 0.00125, 0.4);
  const double r3 = energy_residual(s, 1e-3, 2.0, 0.000625, 0.4);
  const double ratio = (r1 - r2) / (r2 - r3);
  MESSAGE("residuals " << r1 << " " << r2 << " " << r3 << ", three-point ratio " << ratio);
  CHECK(ratio >= 3.2);
  CHECK(ratio <= 4.8);
}

TEST_CASE("inviscid energy residual shrinks at least quadratically") {
  Setup s(32, 24, 0.0, 1e-3, 2.0);
  const double r1 = energy_residual(s, 1e-3, 2.0, 0.01, 0.5);
  const double r2 = energy_residual(s, 1e-3, 2.0, 0.005, 0.5);
  MESSAGE("inviscid residuals " << r1 << " " << r2 << ", ratio " << r1 / r2);
  CHECK(std::abs(r1 / r2) >= 3.2);
}

TEST_CASE("surface boundary conditions hold after a viscous step") {
  // Cleaning is disabled so the state is exactly the implicit solve's output.
  const double k = 1.0, amp = 0.02, eps = 0.05;
  DynamicsConfig cfg;
  cfg.div_tol = 1e300;
  Setup s(32, 32, eps, amp, k, cfg);
  FlowState st = standing_wave(s.stepper, amp, k);
  for (int i = 0; i < 10; ++i) st = s.stepper.step(st, 0.01);
  const Grid& g = s.grid;
  const auto grad = velocity_gradient(st.v, st.frame, g);
  const auto S = strain(grad, 2);
  // Pi S n on the surface.
  double defect = 0.0, scale = 0.0;
  for (int j = 0; j < g.nh(); ++j) {
    double sn[2] = {0.0, 0.0};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) sn[a] += S[a * 2 + b][j] * st.frame.n[b][j];
    const double nn = sn[0] * st.frame.n[0][j] + sn[1] * st.frame.n[1][j];
    for (int a = 0; a < 2; ++a) defect = std::max(defect, std::abs(sn[a] - nn * st.frame.n[a][j]));
    for (const auto& c : grad) scale = std::max(scale, std::abs(c[j]));
  }
  MESSAGE("tangential stress defect " << defect << " against gradient scale " << scale);
  CHECK(defect <= 1e-9 * scale);
  // The divergence row on the surface is enforced too.
  const Field div = div_phi(st.v, st.frame, g);
  CHECK(max_abs(Field(div.begin(), div.begin() + g.nh())) <= 1e-9 * scale);
}

TEST_CASE("kinematic condition is integrated to second order") {
  const double k = 1.0, amp = 0.02;
  Setup s(32, 24, 0.0, amp, k);
  FlowState st = standing_wave(s.stepper, amp, k);
  for (int i = 0; i < 20; ++i) st = s.stepper.step(st, 0.01);
  auto vn = [&](const FlowState& f) {
    Field out(s.grid.nh());
    for (int j = 0; j < s.grid.nh(); ++j)
      out[j] = f.v[1][j] - f.v[0][j] * f.frame.grad_eta[0][j];
    return out;
  };
  std::vector<double> defects;
  for (double dt : {0.02, 0.01}) {
    const FlowState next = s.stepper.step(st, dt);
    const Field a = vn(st), b = vn(next);
    double m = 0.0;
    for (int j = 0; j < s.grid.nh(); ++j) {
      const double rate = (next.surface.h[j] - st.surface.h[j]) / dt;
      m = std::max(m, std::abs(rate - 0.5 * (a[j] + b[j])));
    }
    defects.push_back(m);
  }
  MESSAGE("kinematic defects " << defects[0] << " " << defects[1]);
  CHECK(defects[1] < defects[0] / 3.0);
}

TEST_CASE("flat-frame viscous preconditioner is exact") {
  Setup s(16, 16, 0.1, 0.0, 1.0);
  const Grid& g = s.grid;
  const DiffeoFrame fr = flat_frame(g, s.stepper.A());
  std::vector<Field> rhs = {
      sample(g, [](double y, double z) { return std::sin(y) * std::exp(z); }),
      sample(g, [](double y, double z) { return std::cos(2 * y) * z * z; })};
  const auto u = s.stepper.viscous_solve(rhs, fr, 0.05);
  CHECK(s.stepper.last_stats().viscous_iterations <= 2);
  const auto back = s.stepper.viscous_apply(u, fr, 0.05);
  // Interior rows reproduce the right-hand side; boundary rows vanish.
  const int nh = g.nh(), nz = g.nl() - 1;
  double interior = 0.0, boundary = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int l = 0; l <= nz; ++l)
      for (int j = 0; j < nh; ++j) {
        const std::size_t k = static_cast<std::size_t>(l) * nh + j;
        if (l == 0 || l == nz)
          boundary = std::max(boundary, std::abs(back[i][k]));
        else
          interior = std::max(interior, std::abs(back[i][k] - rhs[i][k]));
      }
  CHECK(interior < 1e-10);
  CHECK(boundary < 1e-10);
}

TEST_CASE("viscous solve on a curved frame satisfies its rows") {
  const double amp = 0.05;
  Setup s(32, 24, 0.1, amp, 1.0);
  const Grid& g = s.grid;
  const FlowState st = standing_wave(s.stepper, amp, 1.0);
  std::vector<Field> rhs = {sample(g, [](double y, double z) { return std::sin(y) * (1 + z); }),
                            sample(g, [](double y, double z) { return std::cos(y) * z; })};
  const auto u = s.stepper.viscous_solve(rhs, st.frame, 0.02);
  const auto back = s.stepper.viscous_apply(u, st.frame, 0.02);
  double err = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int l = 1; l + 1 < g.nl(); ++l)
      for (int j = 0; j < g.nh(); ++j) {
        const std::size_t k = static_cast<std::size_t>(l) * g.nh() + j;
        err = std::max(err, std::abs(back[i][k] - rhs[i][k]));
      }
  CHECK(err < 1e-9);
  CHECK(s.stepper.last_stats().viscous_iterations < 40);
}

TEST_CASE("cfl limit") {
  Setup s(32, 16, 0.0, 0.0, 1.0);
  const FlowState rest = standing_wave(s.stepper, 0.0, 1.0);
  const double kmax = 16.0;
  const double expected = s.stepper.config().cfl_wave / omega(kmax, 2.0);
  CHECK(s.stepper.cfl_limit(rest) == doctest::Approx(expected).epsilon(1e-12));

  // Gravity waves: dt scales like k_max^(-1/2) when the resolution doubles.
  Setup fine(64, 16, 0.0, 0.0, 1.0);
  const FlowState rest2 = standing_wave(fine.stepper, 0.0, 1.0);
  CHECK(fine.stepper.cfl_limit(rest2) / s.stepper.cfl_limit(rest) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));

  // A fast uniform stream makes the advective bound bind and halve under refinement.
  const double U = 50.0;
  FlowState moving = rest, moving2 = rest2;
  std::fill(moving.v[0].begin(), moving.v[0].end(), U);
  std::fill(moving2.v[0].begin(), moving2.v[0].end(), U);
  const double dy = 2 * kPi / 32;
  CHECK(s.stepper.cfl_limit(moving) == doctest::Approx(0.5 * dy / U).epsilon(1e-12));
  CHECK(fine.stepper.cfl_limit(moving2) / s.stepper.cfl_limit(moving) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("divergence residual oracles") {
  Grid g({.d = 1, .nx = 32, .nz = 16, .lx = 2 * kPi, .depth = 2.0});
  FlowState st;
  st.frame = flat_frame(g, 1.3);
  st.surface = SurfaceState::from_values(g, Field(g.nh(), 0.0));
  // Constant vertical velocity.
  st.v = {Field(g.size(), 0.0), Field(g.size(), 1.0)};
  CHECK(divergence_residual(st, g) < 1e-13);
  // v = (d_3 psi, -d_1 psi) from a stream function.
  const Field psi = sample(g, [](double y, double z) { return std::sin(2 * y) * std::exp(z) * z; });
  st.v = {apply_dphi(psi, 1, st.frame, g), apply_dphi(psi, 0, st.frame, g)};
  for (double& x : st.v[1]) x = -x;
  CHECK(divergence_residual(st, g) < 1e-12);
}

TEST_CASE("projection removes the interior divergence") {
  const double amp = 0.05;
  Setup s(32, 24, 0.0, amp, 1.0);
  const Grid& g = s.grid;
  FlowState st = standing_wave(s.stepper, amp, 1.0);
  st.v = {sample(g, [](double y, double z) { return std::sin(y) * std::cos(z); }),
          sample(g, [](double y, double z) { return std::cos(y) * z * (z + 2.0); })};
  const double before = divergence_residual(st, g);
  s.stepper.project(st);
  const Field div = div_phi(st.v, st.frame, g);
  double interior = 0.0;
  for (int l = 1; l + 1 < g.nl(); ++l)
    for (int j = 0; j < g.nh(); ++j)
      interior = std::max(interior, std::abs(div[static_cast<std::size_t>(l) * g.nh() + j]));
  MESSAGE("divergence " << before << " -> interior max " << interior);
  CHECK(interior < 1e-9 * before);
}

TEST_CASE("breakdown and setup errors") {
  Grid g({.d = 1, .nx = 16, .nz = 12, .lx = 2 * kPi, .depth = 2.0});
  const auto chi = CutoffProfile::smooth_step();
  Stepper st(g, chi, 1.0, {});
  // A steep surface folds the strip map.
  const Field h = sample_surface(g, [](double y) { return 0.9 * std::cos(y); });
  CHECK_THROWS_AS(st.make_state({Field(g.size(), 0.0), Field(g.size(), 0.0)},
                                SurfaceState::from_values(g, h)),
                  BreakdownError);

  FlowState ok = standing_wave(st, 1e-3, 1.0);
  ok.v[0][5] = std::nan("");
  CHECK_THROWS_AS(check_finite(ok, g), BreakdownError);

  // A long domain lets the extension reach the bottom.
  Grid wide({.d = 1, .nx = 16, .nz = 12, .lx = 8 * kPi, .depth = 2.0});
  CHECK_THROWS_AS(Stepper(wide, chi, 1.0, {}), SetupError);
  DynamicsConfig bad;
  bad.eps = -1.0;
  CHECK_THROWS_AS(Stepper(g, chi, 1.0, bad), ConfigError);
  CHECK_THROWS_AS(st.step(ok, 0.0), DomainError);
}
