#include "fsns/lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "fsns/checkpoint.hpp"
#include "fsns/csv.hpp"
#include "fsns/elliptic.hpp"
#include "fsns/error.hpp"
#include "fsns/kernels.hpp"

namespace fsns {

namespace {

namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw Error("failed writing " + path.string());
}

std::string fmt_opt(const std::optional<double>& x) { return x ? fmt_double(*x) : ""; }

std::string eps_label(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "eps_%g", eps);
  return buf;
}

// Uniform [-1, 1) from the raw 64-bit engine output, identical on every
// standard library.
double symmetric_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

std::string steps_csv(const std::vector<StepRow>& rows) {
  std::string out = "step,t,dt,pressure_iterations,viscous_iterations,cleaned,divergence,bc_residual\n";
  for (const auto& r : rows)
    out += csv_join({std::to_string(r.step), fmt_double(r.t), fmt_double(r.dt),
                     std::to_string(r.pressure_iterations), std::to_string(r.viscous_iterations),
                     r.cleaned ? "1" : "0", fmt_double(r.divergence), fmt_opt(r.bc_residual)}) +
           "\n";
  return out;
}

std::string monitor_csv(const std::vector<MonitorRow>& rows) {
  std::string out = monitor_csv_header() + "\n";
  for (const auto& r : rows) out += monitor_csv_row(r) + "\n";
  return out;
}

// Tangential stress on the surface relative to the largest surface velocity
// gradient.
double bc_residual(const FlowState& s, const Grid& grid) {
  const double stress = surface_max(s_n(s, grid), grid);
  const double scale = surface_max(velocity_gradient(s.v, s.frame, grid), grid);
  return scale > 0.0 ? stress / scale : stress;
}

double l2_distance(const FlowState& a, const FlowState& b, const Grid& grid) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) {
    Field d(a.v[i].size());
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = a.v[i][k] - b.v[i][k];
    const double n = grid.l2(d);
    sum += n * n;
  }
  return std::sqrt(sum);
}

// Max |v_a - v_b| over levels strictly below the band z >= -4 sqrt(eps).
double linf_interior(const FlowState& a, const FlowState& b, const Grid& grid, double eps) {
  const double band = 4.0 * std::sqrt(eps);
  const auto& z = grid.z();
  const int nh = grid.nh();
  double m = 0.0;
  for (int l = 0; l < grid.nl(); ++l) {
    if (z[l] >= -band) continue;
    for (std::size_t i = 0; i < a.v.size(); ++i)
      for (int j = 0; j < nh; ++j) {
        const std::size_t k = static_cast<std::size_t>(l) * nh + j;
        m = std::max(m, std::abs(a.v[i][k] - b.v[i][k]));
      }
  }
  return m;
}

double h_distance(const FlowState& a, const FlowState& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.surface.h.size(); ++j)
    m = std::max(m, std::abs(a.surface.h[j] - b.surface.h[j]));
  return m;
}

// (int f^4 dt)^(1/4) by the trapezoid rule over the monitored rows.
double l4_in_time(const std::vector<MonitorRow>& rows) {
  double s = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    s += 0.5 * (rows[i].t - rows[i - 1].t) * (std::pow(rows[i].dzv_m1, 4) + std::pow(rows[i - 1].dzv_m1, 4));
  return std::pow(s, 0.25);
}

bool same(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

}  // namespace

GridSpec grid_spec(const RunConfig& cfg) {
  GridSpec s;
  s.d = cfg.d;
  s.nx = cfg.ny;
  s.ny = cfg.d == 2 ? cfg.ny : 1;
  s.nz = cfg.nz;
  s.lx = cfg.L;
  s.ly = cfg.L;
  s.depth = cfg.H;
  return s;
}

DynamicsConfig dynamics_config(const RunConfig& cfg, double eps) {
  DynamicsConfig d;
  d.eps = eps;
  d.gravity = cfg.g;
  d.div_tol = cfg.div_tol;
  d.pressure_tol = cfg.solver_tol;
  d.viscous_tol = cfg.solver_tol;
  d.filter_order = cfg.filter_order;
  d.filter_strength = cfg.filter_strength;
  return d;
}

CutoffProfile cutoff(const RunConfig& cfg) { return CutoffProfile::smooth_step(cfg.r1, cfg.r2); }

Field initial_surface(const RunConfig& cfg, const Grid& grid) {
  const double periods = cfg.k * cfg.L / (2.0 * kPi);
  if (std::abs(periods - std::round(periods)) > 1e-9)
    throw ConfigError("init.k: k L / (2 pi) must be an integer");
  Field h(grid.nh());
  for (int j = 0; j < grid.nh(); ++j) h[j] = cfg.amplitude * std::cos(cfg.k * grid.coord(0, j));
  if (cfg.noise > 0.0) {
    std::mt19937_64 rng(cfg.seed);
    const double base = 2.0 * kPi / cfg.L;
    for (int a = 0; a < cfg.d; ++a)
      for (int mode = 2; mode <= 5; ++mode) {
        const double c = cfg.noise * symmetric_uniform(rng);
        const double s = cfg.noise * symmetric_uniform(rng);
        for (int j = 0; j < grid.nh(); ++j) {
          const double y = grid.coord(a, j);
          h[j] += c * std::cos(mode * base * y) + s * std::sin(mode * base * y);
        }
      }
  }
  return h;
}

double initial_A(const RunConfig& cfg, const Grid& grid) {
  if (!cfg.checkpoint.empty()) {
    try {
      return read_checkpoint(cfg.checkpoint).A;
    } catch (const Error& e) {
      throw ConfigError(std::string("init.checkpoint: ") + e.what());
    }
  }
  try {
    return choose_A(SurfaceState::from_values(grid, initial_surface(cfg, grid)), cutoff(cfg), grid);
  } catch (const SetupError& e) {
    throw ConfigError(std::string("init.amplitude: ") + e.what());
  }
}

FlowState initial_state(const RunConfig& cfg, Stepper& stepper) {
  const Grid& grid = stepper.grid();
  if (!cfg.checkpoint.empty()) {
    try {
      FlowState s = restore(read_checkpoint(cfg.checkpoint), stepper);
      s.eps = stepper.config().eps;
      return s;
    } catch (const Error& e) {
      throw ConfigError(std::string("init.checkpoint: ") + e.what());
    }
  }
  std::vector<Field> v(grid.d() + 1, Field(grid.size(), 0.0));
  FlowState s = stepper.make_state(std::move(v), SurfaceState::from_values(grid, initial_surface(cfg, grid)));
  s.eps = stepper.config().eps;
  if (!cfg.irrotational) {
    const double u0 = cfg.amplitude * std::sqrt(cfg.g * cfg.k);
    const auto& z = grid.z();
    for (int l = 0; l < grid.nl(); ++l)
      for (int j = 0; j < grid.nh(); ++j)
        s.v[0][static_cast<std::size_t>(l) * grid.nh() + j] =
            u0 * std::sin(cfg.k * grid.coord(0, j)) * std::cos(kPi * z[l] / cfg.H);
    stepper.project(s);
  }
  return s;
}

TimeGrid time_grid(const RunConfig& cfg, double dt_limit, double t0) {
  const double span = cfg.T - t0;
  if (!(span > 0.0)) throw ConfigError("physics.T: must exceed the initial time");
  const double target = cfg.dt > 0.0 ? cfg.dt : cfg.cfl * dt_limit;
  if (!(target > 0.0) || !std::isfinite(target)) throw ConfigError("no usable time step");
  TimeGrid tg;
  tg.steps = static_cast<int>(std::ceil(span / target - 1e-9));
  tg.steps = std::max(tg.steps, 1);
  tg.dt = span / tg.steps;
  return tg;
}

RunResult run_single(const RunConfig& cfg, double eps, const RunOptions& opt) {
  validate(cfg);
  Grid grid(grid_spec(cfg));
  const double A = initial_A(cfg, grid);
  Stepper st(grid, cutoff(cfg), A, dynamics_config(cfg, eps));
  FlowState s = initial_state(cfg, st);

  RunResult res;
  res.eps = eps;
  int steps = 0;
  if (opt.dt > 0.0) {
    res.dt = opt.dt;
    steps = static_cast<int>(std::llround((cfg.T - s.t) / opt.dt));
  } else {
    const TimeGrid tg = time_grid(cfg, st.cfl_limit(s), s.t);
    res.dt = tg.dt;
    steps = tg.steps;
  }

  const fs::path out = opt.out_dir;
  const bool files = !opt.out_dir.empty();
  if (files) {
    fs::create_directories(out);
    write_text(out / "config.ini", to_ini(cfg));
  }

  const MonitorOptions mo{cfg.m, cfg.g};
  res.ledger = energy_audit(s, EnergyLedger{}, grid, cfg.g);
  auto record = [&](int n) {
    const std::size_t idx = res.rows.size();
    const FlowState* ref =
        opt.reference && idx < opt.reference->size() ? &(*opt.reference)[idx] : nullptr;
    res.rows.push_back(monitor(s, grid, mo, res.ledger, ref));
    if (res.rows.back().div_residual > cfg.div_tol) ++res.violations;
    if (eps > 0.0 && n > 0) {
      const double bc = bc_residual(s, grid);
      if (!res.steps.empty()) res.steps.back().bc_residual = bc;
      if (bc > cfg.bc_tol) ++res.violations;
    }
    if (opt.keep_snapshots) res.snapshots.push_back(s);
  };
  record(0);

  for (int n = 1; n <= steps; ++n) {
    try {
      s = st.step(s, res.dt);
      check_finite(s, grid);
    } catch (const BreakdownError& e) {
      res.failure = "breakdown at step " + std::to_string(n) + ": " + e.what();
      res.exit_code = kExitBreakdown;
      break;
    } catch (const NonConvergence& e) {
      res.failure = "solver failure at step " + std::to_string(n) + ": " + e.what();
      res.exit_code = kExitBreakdown;
      break;
    }
    res.steps_taken = n;
    res.ledger = energy_audit(s, res.ledger, grid, cfg.g);
    const StepStats& stats = st.last_stats();
    res.steps.push_back({n, s.t, res.dt, stats.pressure_iterations, stats.viscous_iterations,
                         stats.cleaned, stats.divergence, std::nullopt});
    if (n % cfg.every == 0 || n == steps) record(n);
    if (files && cfg.checkpoint_every > 0 && n % cfg.checkpoint_every == 0) {
      char name[48];
      std::snprintf(name, sizeof name, "checkpoint_%06d.bin", n);
      write_checkpoint((out / name).string(), capture(s, grid, A));
    }
  }
  res.completed = res.failure.empty();
  if (res.completed && res.violations > 0) {
    res.exit_code = kExitAssertion;
    res.failure = std::to_string(res.violations) + " monitored rows exceed the divergence or stress tolerance";
  }
  res.final_state = s;

  if (files) {
    write_text(out / "monitor.csv", monitor_csv(res.rows));
    write_text(out / "steps.csv", steps_csv(res.steps));
    write_checkpoint((out / "final.bin").string(), capture(s, grid, A));
  }
  return res;
}

SweepReport run_sweep(const RunConfig& cfg, const std::string& out_dir) {
  validate(cfg);
  if (cfg.eps.back() != 0.0) throw ConfigError("physics.eps: a sweep needs a final 0 entry as the Euler reference");
  std::vector<double> eps(cfg.eps.begin(), cfg.eps.end() - 1);

  // Common step from the shared initial state; the CFL limit does not depend on eps.
  Grid grid(grid_spec(cfg));
  SweepReport rep;
  {
    Stepper probe(grid, cutoff(cfg), initial_A(cfg, grid), dynamics_config(cfg, 0.0));
    const FlowState s0 = initial_state(cfg, probe);
    const TimeGrid tg = time_grid(cfg, probe.cfl_limit(s0), s0.t);
    rep.dt = tg.dt;
    rep.steps = tg.steps;
  }
  const fs::path out = out_dir;
  auto member_dir = [&](double e) { return out_dir.empty() ? std::string() : (out / eps_label(e)).string(); };

  RunOptions ref_opt;
  ref_opt.out_dir = member_dir(0.0);
  ref_opt.dt = rep.dt;
  ref_opt.keep_snapshots = true;
  const RunResult ref = run_single(cfg, 0.0, ref_opt);

  std::vector<RunResult> runs(eps.size());
  std::vector<std::string> errors(eps.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(cfg.jobs)
  for (std::size_t i = 0; i < eps.size(); ++i) {
    RunOptions o;
    o.out_dir = member_dir(eps[i]);
    o.dt = rep.dt;
    o.reference = ref.completed ? &ref.snapshots : nullptr;
    o.keep_snapshots = true;
    try {
      runs[i] = run_single(cfg, eps[i], o);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }

  // Single-threaded reduction.
  auto summarize = [&](const RunResult& r, double e, const std::string& error) {
    SweepMember m;
    m.eps = e;
    m.completed = error.empty() && r.failure.empty();
    m.failure = error.empty() ? r.failure : error;
    if (!error.empty()) return m;
    m.max_Qm = 0.0;
    m.min_taylor = std::numeric_limits<double>::infinity();
    for (const auto& row : r.rows) {
      m.max_Qm = std::max(m.max_Qm, row.Qm_total);
      m.min_taylor = std::min(m.min_taylor, row.taylor_min);
    }
    m.energy_residual = r.ledger.relative_residual();
    if (!r.rows.empty()) m.layer_width = r.rows.back().layer_width;
    m.dzv_l4 = l4_in_time(r.rows);
    return m;
  };
  rep.reference = summarize(ref, 0.0, "");
  rep.partial = !rep.reference.completed;

  std::string dist = "t,eps,l2_distance,linf_interior,h_distance,layer_width\n";
  for (std::size_t i = 0; i < eps.size(); ++i) {
    SweepMember m = summarize(runs[i], eps[i], errors[i]);
    // Exceeding a monitored tolerance is reported but keeps the member usable.
    const bool usable = errors[i].empty() && runs[i].exit_code != kExitBreakdown;
    if (!m.completed) rep.partial = true;
    if (usable && ref.completed) {
      const auto& snaps = runs[i].snapshots;
      const std::size_t n = std::min(snaps.size(), ref.snapshots.size());
      for (std::size_t k = 0; k < n; ++k) {
        const double l2 = l2_distance(snaps[k], ref.snapshots[k], grid);
        const double li = linf_interior(snaps[k], ref.snapshots[k], grid, eps[i]);
        m.sup_l2_distance = std::max(m.sup_l2_distance, l2);
        m.sup_linf_interior = std::max(m.sup_linf_interior, li);
        dist += csv_join({fmt_double(snaps[k].t), fmt_double(eps[i]), fmt_double(l2), fmt_double(li),
                          fmt_double(h_distance(snaps[k], ref.snapshots[k])),
                          fmt_opt(runs[i].rows[k].layer_width)}) +
                "\n";
      }
      if (n > 0 && n == ref.snapshots.size()) {
        m.l2_distance = l2_distance(snaps[n - 1], ref.snapshots[n - 1], grid);
        m.linf_interior = linf_interior(snaps[n - 1], ref.snapshots[n - 1], grid, eps[i]);
        m.h_distance = h_distance(snaps[n - 1], ref.snapshots[n - 1]);
      }
    }
    if (!usable) m.layer_width.reset();
    rep.members.push_back(m);
  }

  const auto& ms = rep.members;
  const bool all_ok = !ms.empty() && std::all_of(ms.begin(), ms.end(), [](const SweepMember& m) {
    return m.completed;
  });
  if (all_ok && ref.completed) {
    rep.l2_decreasing = rep.linf_decreasing = true;
    for (std::size_t i = 1; i < ms.size(); ++i) {
      rep.l2_decreasing = rep.l2_decreasing && ms[i].l2_distance < ms[i - 1].l2_distance;
      rep.linf_decreasing = rep.linf_decreasing && ms[i].linf_interior < ms[i - 1].linf_interior;
    }
    rep.l2_reduction = ms.back().l2_distance / ms.front().l2_distance;
    double qmax = 0.0;
    for (const auto& m : ms) qmax = std::max(qmax, m.max_Qm);
    rep.qm_ratio = qmax / ms.front().max_Qm;
  }
  rep.min_taylor = rep.reference.min_taylor;
  for (const auto& m : ms) rep.min_taylor = std::min(rep.min_taylor, m.min_taylor);
  const SweepMember* w2 = nullptr;
  const SweepMember* w3 = nullptr;
  for (const auto& m : ms) {
    if (same(m.eps, 1e-2)) w2 = &m;
    if (same(m.eps, 1e-3)) w3 = &m;
  }
  if (w2 && w3 && w2->layer_width && w3->layer_width && *w3->layer_width > 0.0)
    rep.layer_ratio_2_3 = *w2->layer_width / *w3->layer_width;

  if (!out_dir.empty()) {
    std::string sweep =
        "eps,completed,l2_distance,linf_interior,h_distance,sup_l2_distance,sup_linf_interior,"
        "max_Qm,min_taylor,energy_residual,layer_width,dzv_l4\n";
    auto row = [](const SweepMember& m) {
      return csv_join({fmt_double(m.eps), m.completed ? "1" : "0", fmt_double(m.l2_distance),
                       fmt_double(m.linf_interior), fmt_double(m.h_distance), fmt_double(m.sup_l2_distance),
                       fmt_double(m.sup_linf_interior), fmt_double(m.max_Qm), fmt_double(m.min_taylor),
                       fmt_double(m.energy_residual), fmt_opt(m.layer_width), fmt_double(m.dzv_l4)}) +
             "\n";
    };
    for (const auto& m : ms) sweep += row(m);
    sweep += row(rep.reference);
    write_text(out / "sweep.csv", sweep);
    write_text(out / "distances.csv", dist);
    std::ostringstream sum;
    sum << "key,value\n"
        << "dt," << fmt_double(rep.dt) << "\nsteps," << rep.steps << "\npartial," << rep.partial
        << "\nl2_decreasing," << rep.l2_decreasing << "\nlinf_decreasing," << rep.linf_decreasing
        << "\nl2_reduction," << fmt_double(rep.l2_reduction) << "\nqm_ratio," << fmt_double(rep.qm_ratio)
        << "\nmin_taylor," << fmt_double(rep.min_taylor) << "\nlayer_ratio," << fmt_opt(rep.layer_ratio_2_3)
        << "\n";
    write_text(out / "summary.csv", sum.str());
  }
  return rep;
}

std::vector<KernelFamilyResult> run_kernels(const RunConfig& cfg, const std::string& out_dir) {
  validate(cfg);
  const fs::path out = out_dir;
  const bool files = !out_dir.empty();
  std::vector<KernelFamilyResult> results;

  {
    const HeatSummary h = heat_sweep(cfg.heat_per_axis, cfg.heat_gamma_min);
    const bool ok = h.violations == 0 && std::abs(h.spot_gamma - 0.5) <= 1e-6 &&
                    std::abs(h.spot_tau - std::sqrt(0.5)) <= 1e-6;
    results.push_back({"heat", ok,
                       std::to_string(h.violations) + " of " + std::to_string(h.samples) +
                           " modes above 1, max ratio " + fmt_double(h.max_ratio)});
    if (files)
      write_text(out / "heat.csv",
                 "samples,violations,max_ratio,min_ratio,spot_gamma,spot_tau,passed\n" +
                     csv_join({std::to_string(h.samples), std::to_string(h.violations), fmt_double(h.max_ratio),
                               fmt_double(h.min_ratio), fmt_double(h.spot_gamma), fmt_double(h.spot_tau),
                               ok ? "1" : "0"}) +
                     "\n");
  }

  {
    Profile p;
    p.f = [](double z) { return z >= 1.0 ? 0.0 : std::pow(std::sin(kPi * z), 3); };
    p.df = [](double z) {
      if (z >= 1.0) return 0.0;
      const double s = std::sin(kPi * z);
      return 3.0 * kPi * s * s * std::cos(kPi * z);
    };
    const auto drift = [](double t) { return 1.0 + 0.5 * std::sin(2.0 * t); };
    const std::vector<double> times = {0.25, 0.5, 1.0};
    std::string csv = "eps,ratio,contraction,max_mass_defect,passed\n";
    bool ok = true;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double e : cfg.fp_eps) {
      const FpBound b = fp_conormal_bound(p, drift, e, times);
      const bool row_ok = b.max_mass_defect <= 1e-8 && b.contraction <= 1.0 + 1e-12;
      ok = ok && row_ok;
      lo = std::min(lo, b.ratio);
      hi = std::max(hi, b.ratio);
      csv += csv_join({fmt_double(e), fmt_double(b.ratio), fmt_double(b.contraction),
                       fmt_double(b.max_mass_defect), row_ok ? "1" : "0"}) +
             "\n";
    }
    const bool band = hi <= 2.0 * lo;
    ok = ok && band;
    results.push_back({"fp", ok, "conormal ratio band " + fmt_double(lo) + " .. " + fmt_double(hi)});
    if (files) write_text(out / "fp.csv", csv);
  }

  {
    const SymbolBounds b{cfg.sym_m, cfg.sym_M, cfg.sym_c0};
    std::string csv = "samples,axis_eigenvalues,delta,kappa,min_re_split,passed,detail\n";
    try {
      const SymmetrizerSummary s = symmetrizer_sweep(b, cfg.sym_samples, cfg.kappa_min);
      const bool ok = s.axis_eigenvalues == 0 && s.kappa >= cfg.kappa_min;
      results.push_back({"symmetrizer", ok, "delta " + fmt_double(s.delta) + ", kappa " + fmt_double(s.kappa)});
      csv += csv_join({std::to_string(s.samples), std::to_string(s.axis_eigenvalues), fmt_double(s.delta),
                       fmt_double(s.kappa), fmt_double(s.min_re_split), ok ? "1" : "0", ""}) +
             "\n";
    } catch (const SearchFailure& e) {
      results.push_back({"symmetrizer", false, std::string("search failure: ") + e.what()});
      csv += csv_join({std::to_string(cfg.sym_samples), "", "", "", "", "0", "search failure"}) + "\n";
    }
    if (files) write_text(out / "symmetrizer.csv", csv);
  }

  {
    std::string csv = "profile,ratio,passed\n";
    bool ok = true;
    double worst = 0.0;
    for (const auto& p : hardy_corpus()) {
      const double r = hardy_ratio(p);
      const bool row_ok = r <= 4.0;
      ok = ok && row_ok;
      worst = std::max(worst, r);
      csv += csv_join({p.name, fmt_double(r), row_ok ? "1" : "0"}) + "\n";
    }
    results.push_back({"hardy", ok, "largest ratio " + fmt_double(worst)});
    if (files) write_text(out / "hardy.csv", csv);
  }
  return results;
}

std::vector<MonitorRow> run_norms(const RunConfig& cfg, const std::string& out_dir) {
  validate(cfg);
  Grid grid(grid_spec(cfg));
  const double A = initial_A(cfg, grid);
  std::vector<MonitorRow> rows;
  for (double e : cfg.eps) {
    Stepper st(grid, cutoff(cfg), A, dynamics_config(cfg, e));
    const FlowState s = initial_state(cfg, st);
    const EnergyLedger ledger = energy_audit(s, EnergyLedger{}, grid, cfg.g);
    rows.push_back(monitor(s, grid, {cfg.m, cfg.g}, ledger));
  }
  if (!out_dir.empty()) write_text(fs::path(out_dir) / "norms.csv", monitor_csv(rows));
  return rows;
}

}  // namespace fsns
