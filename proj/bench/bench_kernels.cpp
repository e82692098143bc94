// Serial against OpenMP-parallel kernels: vertical derivative, dense level
// operator and one Galerkin elliptic solve.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "fsns/elliptic.hpp"
#include "fsns/geometry.hpp"
#include "fsns/grid.hpp"

using namespace fsns;

namespace {

Grid make_grid(int nz) {
  return Grid({.d = 1, .nx = 256, .nz = nz, .lx = 2 * std::numbers::pi, .depth = 2.0});
}

Field smooth_field(const Grid& g) {
  Field f(g.size());
  for (int l = 0; l < g.nl(); ++l)
    for (int j = 0; j < g.nh(); ++j)
      f[static_cast<std::size_t>(l) * g.nh() + j] = std::cos(g.coord(0, j)) * std::exp(g.z()[l]);
  return f;
}

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::parallel : Exec::serial; }

void BM_dz(benchmark::State& state) {
  const Grid g = make_grid(static_cast<int>(state.range(0)));
  const Field f = smooth_field(g);
  const Exec ex = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(g.dz(f, ex));
}

void BM_apply_matrix(benchmark::State& state) {
  const Grid g = make_grid(static_cast<int>(state.range(0)));
  const Field f = smooth_field(g);
  RowMatrix m = RowMatrix::Zero(g.nl(), g.nl());
  for (int i = 0; i < g.nl(); ++i)
    for (int k = 0; k < g.nl(); ++k) m(i, k) = 1.0 / (1.0 + i + k);
  const Exec ex = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(apply_matrix(m, f, g.nh(), ex));
}

void BM_elliptic_solve(benchmark::State& state) {
  const Grid g = make_grid(static_cast<int>(state.range(0)));
  const auto chi = CutoffProfile::smooth_step();
  Field top(g.nh());
  for (int j = 0; j < g.nh(); ++j) top[j] = 0.05 * std::cos(g.coord(0, j));
  const auto h = SurfaceState::from_values(g, top);
  const double A = choose_A(h, chi, g);
  const auto frame = assemble_frame(h, A, chi, g);
  const EllipticSolver solver(g, A, BottomCondition::neumann_zero, exec_of(state));
  EllipticProblem p;
  p.frame = &frame;
  p.rhs_plain = smooth_field(g);
  p.bottom = BottomCondition::neumann_zero;
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(p, 1e-10, 500));
}

}  // namespace

BENCHMARK(BM_dz)->ArgsProduct({{32, 64, 128}, {0, 1}})->ArgNames({"nz", "parallel"});
BENCHMARK(BM_apply_matrix)->ArgsProduct({{32, 64, 128}, {0, 1}})->ArgNames({"nz", "parallel"});
BENCHMARK(BM_elliptic_solve)->ArgsProduct({{32, 64}, {0, 1}})->ArgNames({"nz", "parallel"})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
