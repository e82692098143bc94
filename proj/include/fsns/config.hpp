#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fsns {

/// Run configuration. The file format is INI (`[section]` headers and
/// `key = value` lines, `#` or `;` comments); unknown or repeated keys are
/// errors. Keys are documented in README.md.
struct RunConfig {
  // [grid]
  int d = 1;
  int ny = 32;  // horizontal points
  int nz = 64;
  double L = 6.283185307179586;
  double H = 2.0;
  // [physics]
  double g = 9.81;
  std::vector<double> eps = {0.01};  // strictly decreasing
  double T = 1.0;
  double dt = 0.0;   // 0 selects dt from the CFL limit
  double cfl = 1.0;  // safety factor on the CFL limit
  // [init]
  double k = 1.0;
  double amplitude = 0.02;
  bool irrotational = true;
  double noise = 0.0;  // seeded random surface perturbation
  std::string checkpoint;  // optional state to start from
  // [cutoff]
  double r1 = 1.0, r2 = 2.0;
  // [tolerances]
  double div_tol = 1e-6;
  double bc_tol = 1e-6;  // relative to the largest velocity gradient
  double solver_tol = 1e-12;
  // [numerics]
  int filter_order = 0;  // vertical modal filter order, 0 disables
  double filter_strength = 36.0;
  // [monitor]
  int m = 4;
  int every = 10;
  int checkpoint_every = 0;
  // [output]
  std::string out_dir = "out";
  int jobs = 1;  // concurrent sweep members
  // [run]
  std::uint64_t seed = 0;
  // [kernels]
  int heat_per_axis = 10;
  double heat_gamma_min = 1.0;
  int sym_samples = 1000;
  double sym_m = 0.5, sym_M = 4.0, sym_c0 = 0.25;
  double kappa_min = 1e-3;
  std::vector<double> fp_eps = {1e-2, 1e-3, 1e-4};
};

/// Parses and validates; throws ConfigError with the offending key.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);
/// Applies the structural checks to a programmatically built config.
void validate(const RunConfig& c);

/// Comma-separated list of doubles, e.g. "1e-1,1e-2,0".
std::vector<double> parse_list(const std::string& text);

/// Canonical INI text of a config; parse_config(to_ini(c)) == c.
std::string to_ini(const RunConfig& c);

}  // namespace fsns
