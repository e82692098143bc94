#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fsns/error.hpp"
#include "fsns/kernels.hpp"

using namespace fsns;

namespace {

const double kPi = std::numbers::pi;

// Smooth bump on [0, 1] vanishing at both ends.
Profile bump() {
  Profile p;
  p.f = [](double z) { return z >= 1.0 ? 0.0 : std::pow(std::sin(kPi * z), 3); };
  p.df = [](double z) {
    if (z >= 1.0) return 0.0;
    const double s = std::sin(kPi * z);
    return 3.0 * kPi * s * s * std::cos(kPi * z);
  };
  p.support = 1.0;
  return p;
}

double drift(double t) { return 1.0 + 0.5 * std::sin(2.0 * t); }

}  // namespace

TEST_CASE("clenshaw-curtis integrates polynomials exactly") {
  const CCRule r = cc_rule(8);
  for (int p = 0; p <= 8; ++p) {
    double s = 0.0;
    for (std::size_t k = 0; k < r.x.size(); ++k) s += r.w[k] * std::pow(r.x[k], p);
    const double exact = (p % 2 == 1) ? 0.0 : 2.0 / (p + 1);
    CHECK(s == doctest::Approx(exact).epsilon(1e-14));
  }
  const QuadResult q = composite_cc([](double x) { return std::exp(x); }, 0.0, 2.0, 4);
  CHECK(q.value == doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-14));
  CHECK(q.error < 1e-12);
}

TEST_CASE("heat trace gain spot values") {
  CHECK(heat_trace_gain(1.0, 0.0, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(heat_trace_gain(1.0, 1e12, 0.0, 1.0) ==
        doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-6));
  CHECK(heat_trace_gain(1.0, -1e12, 0.0, 0.5) ==
        doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-6));
  CHECK_THROWS_AS(heat_trace_gain(0.5, 0.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(heat_trace_gain(1.0, 0.0, 0.0, 0.0), DomainError);
  CHECK_THROWS_AS(heat_trace_gain(1.0, 0.0, 0.0, 2.0), DomainError);
}

TEST_CASE("heat trace gain matches a quadrature of the explicit solution") {
  // Oracle: integrate |exp(r z / sqrt(eps))|^2 over z < 0 numerically.
  for (auto [g, t, x, e] : {std::tuple{1.0, 0.0, 0.0, 1.0}, {3.0, 7.0, 2.0, 0.1},
                            {1.5, -40.0, 10.0, 0.01}, {20.0, 1.0, 0.5, 0.5}}) {
    const std::complex<double> r = std::sqrt(std::complex<double>(g + e * x * x, t));
    const double rate = 2.0 * r.real() / std::sqrt(e);
    const QuadResult q =
        composite_cc([rate](double z) { return std::exp(rate * z); }, -60.0 / rate, 0.0, 16);
    const double oracle = std::sqrt(g + std::abs(t)) * q.value / std::sqrt(e);
    CHECK(heat_trace_gain(g, t, x, e) == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("heat trace gain stays below one on the mode grid") {
  const HeatSummary s = heat_sweep(10);
  CHECK(s.samples == 10000);
  CHECK(s.violations == 0);
  CHECK(s.max_ratio <= 1.0);
  CHECK(s.spot_gamma == doctest::Approx(0.5));
  CHECK_THROWS_AS(heat_sweep(10, 0.5), DomainError);
}

TEST_CASE("fokker-planck kernel without drift is the heat kernel") {
  // A Gaussian of variance s2 widens to s2 + 2 eps t.
  const double s2 = 0.01, eps = 0.05, t = 0.4;
  Profile g;
  g.f = [s2](double z) { return std::exp(-z * z / (2 * s2)); };
  g.df = [s2](double z) { return -z / s2 * std::exp(-z * z / (2 * s2)); };
  g.support = 2.0;  // the tail beyond is below 1e-86
  FpOptions opt;
  opt.eps = eps;
  opt.t = t;
  opt.odd_extension = false;
  const std::vector<double> z = {0.0, 0.05, 0.1, 0.2, 0.35};
  const FpEvolution e = fp_evolve(g, [](double) { return 0.0; }, z, opt);
  const double v = s2 + 2 * eps * t;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double exact = std::sqrt(s2 / v) * std::exp(-z[i] * z[i] / (2 * v));
    CHECK(e.g[i] == doctest::Approx(exact).epsilon(1e-10));
    // z d_z of the widened Gaussian.
    CHECK(e.z_dz_g[i] == doctest::Approx(-z[i] * z[i] / v * exact).epsilon(1e-9));
  }
  CHECK(e.kernel.spread == doctest::Approx(t).epsilon(1e-12));
}

TEST_CASE("fokker-planck kernel has unit mass and contracts") {
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4})
    for (double t : {0.1, 0.5, 1.5}) {
      FpOptions opt;
      opt.eps = eps;
      opt.t = t;
      const FpKernel k = fp_kernel(drift, opt);
      CHECK(std::abs(k.mass - 1.0) <= 1e-8);
      // Drift integral of 1 + 0.5 sin(2 t).
      CHECK(k.big_gamma == doctest::Approx(t + 0.25 * (1 - std::cos(2 * t))).epsilon(1e-12));
    }
  const FpBound b = fp_conormal_bound(bump(), drift, 1e-2, {0.25, 0.5, 1.0});
  CHECK(b.contraction <= 1.0);
  CHECK(b.max_mass_defect <= 1e-8);
}

TEST_CASE("fokker-planck evolution matches transport along characteristics") {
  // Oracle: a finite-difference z d_z of the evolved profile, and the
  // inviscid limit g = f0(exp(-G) z).
  FpOptions opt;
  opt.eps = 1e-3;
  opt.t = 0.5;
  const Profile p = bump();
  const std::vector<double> z = {0.2, 0.6, 1.0, 1.3};
  const FpEvolution e = fp_evolve(p, drift, z, opt);
  const double h = 1e-5;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const FpEvolution ep = fp_evolve(p, drift, {z[i] + h}, opt);
    const FpEvolution em = fp_evolve(p, drift, {z[i] - h}, opt);
    const double fd = z[i] * (ep.g[0] - em.g[0]) / (2 * h);
    CHECK(e.z_dz_g[i] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
    const double transport = p.f(std::exp(-e.kernel.big_gamma) * z[i]);
    CHECK(std::abs(e.g[i] - transport) < 0.05);
  }
}

TEST_CASE("fokker-planck conormal ratio is homogeneous and uniform in eps") {
  const std::vector<double> times = {0.25, 0.5, 1.0};
  const Profile p = bump();
  Profile scaled = p;
  scaled.f = [p](double z) { return 7.0 * p.f(z); };
  scaled.df = [p](double z) { return 7.0 * p.df(z); };
  const double r = fp_conormal_bound(p, drift, 1e-2, times).ratio;
  CHECK(fp_conormal_bound(scaled, drift, 1e-2, times).ratio == doctest::Approx(r).epsilon(1e-12));
  double lo = r, hi = r;
  for (double eps : {1e-3, 1e-4}) {
    const double q = fp_conormal_bound(p, drift, eps, times).ratio;
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  MESSAGE("conormal ratio band " << lo << " .. " << hi);
  CHECK(hi <= 2.0 * lo);

  Profile bad = p;
  bad.f = [](double) { return 1.0; };
  CHECK_THROWS_AS(fp_evolve(bad, drift, {0.1}, FpOptions{}), PreconditionError);
  CHECK_THROWS_AS(fp_kernel([](double) { return std::nan(""); }, FpOptions{}), QuadratureError);
}

TEST_CASE("symmetrizer at the identity symbol") {
  SymbolPoint p;  // a0 = 1, a = I, (gamma, tau, xi) = (1, 0, 0)
  const SymmetrizerResult r = symmetrize(p, 0.5);
  CHECK(r.mu_plus.real() == doctest::Approx(1.0));
  CHECK(r.mu_minus.real() == doctest::Approx(-1.0));
  CHECK(std::abs(r.mu_plus.imag()) < 1e-14);
  CHECK((r.S - r.S.adjoint()).norm() < 1e-14);
  // Hand computation: P = [1 1; 1 -1] / sqrt(2), P^-1 = P, S = P diag(1, -d) P.
  CHECK(r.S(0, 0).real() == doctest::Approx(0.25));
  CHECK(r.S(0, 1).real() == doctest::Approx(0.75));
  // S A + (S A)* = P diag(2, 2 d) P has eigenvalues 2 and 1.
  CHECK(r.kappa_sa == doctest::Approx(1.0));
  // Eigenvector identity: A P = P diag(mu).
  const CMat2 A = symbol_matrix(p);
  const CMat2 D = (CMat2() << r.mu_plus, 0.0, 0.0, r.mu_minus).finished();
  CHECK((A * r.P - r.P * D).norm() < 1e-14);
}

TEST_CASE("symmetrizer inequalities hold on a sobol sample") {
  const SymbolBounds b{0.5, 4.0, 0.25};
  const auto pts = sample_symbol_points(b, 1000);
  REQUIRE(pts.size() == 1000);
  for (const auto& p : pts) REQUIRE(admissible(p, b));
  const SymmetrizerSummary s = symmetrizer_sweep(b, 1000);
  MESSAGE("delta " << s.delta << ", kappa " << s.kappa << ", min Re split " << s.min_re_split);
  CHECK(s.axis_eigenvalues == 0);
  CHECK(s.kappa >= 1e-3);
  for (const auto& p : pts) {
    const SymmetrizerResult r = symmetrize(p, s.delta);
    CHECK(r.mu_plus.real() > 0.0);
    CHECK(r.mu_minus.real() < 0.0);
  }
}

TEST_CASE("degenerate coefficients defeat the symmetrizer search") {
  const SymbolBounds degenerate{0.5, 4.0, 0.0};
  CHECK_THROWS_AS(symmetrizer_sweep(degenerate, 200), SearchFailure);
  SymbolPoint p;
  CHECK_THROWS_AS(symmetrizer(p, {}), SearchFailure);
}

TEST_CASE("hardy ratio") {
  for (const auto& p : hardy_corpus()) {
    const double r = hardy_ratio(p);
    MESSAGE(p.name << " ratio " << r);
    CHECK(r > 0.0);
    CHECK(r <= 4.0);
  }
  // Oracle for f = z e^z: both integrals by an independent fine trapezoid rule.
  const auto& ze = hardy_corpus()[0];
  double num = 0.0, den = 0.0;
  const int n = 400000;
  const double L = 60.0, h = L / n;
  for (int i = 0; i <= n; ++i) {
    const double z = -L + i * h, w = (i == 0 || i == n) ? 0.5 * h : h;
    const double q = (z == 0.0) ? 1.0 : std::exp(z) / (1.0 - z);
    num += w * q * q;
    den += w * (1 + z) * (1 + z) * std::exp(2 * z);
  }
  CHECK(hardy_ratio(ze) == doctest::Approx(num / den).epsilon(1e-8));
  HalfLineProfile c{"const", [](double) { return 1.0; }, [](double) { return 0.0; }, 10.0};
  CHECK_THROWS_AS(hardy_ratio(c), PreconditionError);
}
