// Command-line front end: single runs, eps sweeps, kernel checks and norms.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "fsns/config.hpp"
#include "fsns/error.hpp"
#include "fsns/lab.hpp"

using namespace fsns;

namespace {

struct Flags {
  std::string config, out, eps;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "INI configuration file");
  cmd->add_option("--out", f.out, "output directory (overrides output.dir)");
  cmd->add_option("--eps", f.eps, "comma-separated viscosities (overrides physics.eps)");
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&f](std::uint64_t s) { f.seed = s, f.seed_set = true; }, "random seed (overrides run.seed)");
}

RunConfig resolve(const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (!f.out.empty()) c.out_dir = f.out;
  if (!f.eps.empty()) {
    try {
      c.eps = parse_list(f.eps);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("--eps: ") + e.what());
    }
  }
  if (f.seed_set) c.seed = f.seed;
  validate(c);
  return c;
}

int cmd_run(const RunConfig& c) {
  int code = kExitOk;
  for (double eps : c.eps) {
    RunOptions o;
    char dir[32];
    std::snprintf(dir, sizeof dir, "/eps_%g", eps);
    o.out_dir = c.eps.size() == 1 ? c.out_dir : c.out_dir + dir;
    const RunResult r = run_single(c, eps, o);
    std::printf("eps %g: %d steps of %.6g, energy residual %.3e%s%s\n", eps, r.steps_taken, r.dt,
                r.ledger.relative_residual(), r.failure.empty() ? "" : ", ", r.failure.c_str());
    if (r.exit_code != kExitOk && (code == kExitOk || r.exit_code == kExitBreakdown)) code = r.exit_code;
  }
  return code;
}

int cmd_sweep(const RunConfig& c) {
  const SweepReport r = run_sweep(c, c.out_dir);
  for (const auto& m : r.members)
    std::printf("eps %-8g L2 %.4e  interior Linf %.4e  max Qm %.4e  min taylor %.4f  width %s%s\n", m.eps,
                m.l2_distance, m.linf_interior, m.max_Qm, m.min_taylor,
                m.layer_width ? std::to_string(*m.layer_width).c_str() : "-",
                m.completed ? "" : ("  [" + m.failure + "]").c_str());
  std::printf("dt %.6g over %d steps; L2 decreasing %s, interior Linf decreasing %s, Qm ratio %.3f%s\n", r.dt,
              r.steps, r.l2_decreasing ? "yes" : "no", r.linf_decreasing ? "yes" : "no", r.qm_ratio,
              r.partial ? " (partial sweep)" : "");
  return kExitOk;
}

int cmd_kernels(const RunConfig& c) {
  bool ok = true;
  for (const auto& r : run_kernels(c, c.out_dir)) {
    std::printf("%-12s %s  %s\n", r.family.c_str(), r.passed ? "PASS" : "FAIL", r.detail.c_str());
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitAssertion;
}

int cmd_norms(const RunConfig& c) {
  for (const auto& r : run_norms(c, c.out_dir))
    std::printf("eps %-8g Qm %.6e  Vm %.6e  |h|_m %.6e  taylor %.6f\n", r.eps, r.Qm_total, r.Vm_norm, r.h_m,
                r.taylor_min);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free-surface Navier-Stokes laboratory"};
  app.require_subcommand(1);
  Flags flags;
  auto* run = app.add_subcommand("run", "advance one configuration to T for each eps");
  auto* sweep = app.add_subcommand("sweep", "eps sweep against the eps = 0 reference");
  auto* kernels = app.add_subcommand("kernels", "kernel verification families");
  auto* norms = app.add_subcommand("norms", "monitored norms of the initial state");
  for (auto* c : {run, sweep, kernels, norms}) add_flags(c, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const RunConfig cfg = resolve(flags);
    if (*run) return cmd_run(cfg);
    if (*sweep) return cmd_sweep(cfg);
    if (*kernels) return cmd_kernels(cfg);
    return cmd_norms(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SetupError& e) {
    std::cerr << "setup error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const BreakdownError& e) {
    std::cerr << "numerical breakdown: " << e.what() << "\n";
    return kExitBreakdown;
  } catch (const NonConvergence& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitBreakdown;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAssertion;
  }
}
