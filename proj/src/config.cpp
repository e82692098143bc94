#include "fsns/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fsns/error.hpp"

namespace fsns {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double x = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size() || !std::isfinite(x))
    throw ConfigError(key + ": expected a finite number, got '" + text + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long long x = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size())
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

int to_int32(const std::string& key, const std::string& text) {
  const long long x = to_int(key, text);
  if (x < -(1LL << 31) || x >= (1LL << 31)) throw ConfigError(key + ": out of range");
  return static_cast<int>(x);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto num = [&](const char* key, double RunConfig::*field) {
      t[key] = [field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = to_double(k, v); };
    };
    auto integer = [&](const char* key, int RunConfig::*field) {
      t[key] = [field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = to_int32(k, v); };
    };
    auto list = [&](const char* key, std::vector<double> RunConfig::*field) {
      t[key] = [field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = to_list(k, v); };
    };
    integer("grid.d", &RunConfig::d);
    integer("grid.ny", &RunConfig::ny);
    integer("grid.nz", &RunConfig::nz);
    num("grid.L", &RunConfig::L);
    num("grid.H", &RunConfig::H);
    num("physics.g", &RunConfig::g);
    list("physics.eps", &RunConfig::eps);
    num("physics.T", &RunConfig::T);
    num("physics.dt", &RunConfig::dt);
    num("physics.cfl", &RunConfig::cfl);
    num("init.k", &RunConfig::k);
    num("init.amplitude", &RunConfig::amplitude);
    t["init.irrotational"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.irrotational = to_bool(k, v);
    };
    num("init.noise", &RunConfig::noise);
    t["init.checkpoint"] = [](RunConfig& c, const std::string&, const std::string& v) {
      c.checkpoint = trim(v);
    };
    num("cutoff.r1", &RunConfig::r1);
    num("cutoff.r2", &RunConfig::r2);
    num("tolerances.div", &RunConfig::div_tol);
    num("tolerances.bc", &RunConfig::bc_tol);
    num("tolerances.solver", &RunConfig::solver_tol);
    integer("numerics.filter_order", &RunConfig::filter_order);
    num("numerics.filter_strength", &RunConfig::filter_strength);
    integer("monitor.m", &RunConfig::m);
    integer("monitor.every", &RunConfig::every);
    integer("monitor.checkpoint_every", &RunConfig::checkpoint_every);
    t["output.dir"] = [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = trim(v); };
    integer("output.jobs", &RunConfig::jobs);
    t["run.seed"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      const long long s = to_int(k, v);
      if (s < 0) throw ConfigError(k + ": must be nonnegative");
      c.seed = static_cast<std::uint64_t>(s);
    };
    integer("kernels.heat_per_axis", &RunConfig::heat_per_axis);
    num("kernels.heat_gamma_min", &RunConfig::heat_gamma_min);
    integer("kernels.sym_samples", &RunConfig::sym_samples);
    num("kernels.sym_m", &RunConfig::sym_m);
    num("kernels.sym_M", &RunConfig::sym_M);
    num("kernels.sym_c0", &RunConfig::sym_c0);
    num("kernels.kappa_min", &RunConfig::kappa_min);
    list("kernels.fp_eps", &RunConfig::fp_eps);
    return t;
  }();
  return table;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

std::string num_text(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string list_text(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + num_text(xs[i]);
  return out;
}

}  // namespace

std::vector<double> parse_list(const std::string& text) { return to_list("list", text); }

void validate(const RunConfig& c) {
  require(c.d == 1 || c.d == 2, "grid.d: must be 1 or 2");
  require(c.ny >= 4 && c.ny % 2 == 0, "grid.ny: must be even and at least 4");
  require(c.nz >= 4, "grid.nz: must be at least 4");
  require(c.L > 0.0, "grid.L: must be positive");
  require(c.H > 0.0, "grid.H: must be positive");
  require(c.g > 0.0, "physics.g: must be positive");
  require(!c.eps.empty(), "physics.eps: empty list");
  for (std::size_t i = 0; i < c.eps.size(); ++i) {
    require(c.eps[i] >= 0.0 && c.eps[i] <= 1.0, "physics.eps: values must lie in [0, 1]");
    require(i == 0 || c.eps[i] < c.eps[i - 1], "physics.eps: must be strictly decreasing");
  }
  require(c.T > 0.0, "physics.T: must be positive");
  require(c.dt >= 0.0, "physics.dt: must be nonnegative");
  require(c.cfl > 0.0 && c.cfl <= 1.0, "physics.cfl: must lie in (0, 1]");
  require(c.k > 0.0, "init.k: must be positive");
  require(c.amplitude >= 0.0, "init.amplitude: must be nonnegative");
  require(c.noise >= 0.0, "init.noise: must be nonnegative");
  require(c.r1 > 0.0 && c.r2 > c.r1, "cutoff: need 0 < r1 < r2");
  require(c.div_tol > 0.0, "tolerances.div: must be positive");
  require(c.bc_tol > 0.0, "tolerances.bc: must be positive");
  require(c.solver_tol > 0.0 && c.solver_tol < 1e-2, "tolerances.solver: must lie in (0, 1e-2)");
  require(c.filter_order >= 0 && c.filter_order % 2 == 0, "numerics.filter_order: must be even and nonnegative");
  require(c.filter_strength > 0.0, "numerics.filter_strength: must be positive");
  require(c.m >= 2 && c.m <= 8, "monitor.m: must lie in [2, 8]");
  require(c.every >= 1, "monitor.every: must be positive");
  require(c.checkpoint_every >= 0, "monitor.checkpoint_every: must be nonnegative");
  require(!c.out_dir.empty(), "output.dir: empty");
  require(c.jobs >= 1, "output.jobs: must be positive");
  require(c.heat_per_axis >= 2, "kernels.heat_per_axis: must be at least 2");
  require(c.sym_samples >= 1, "kernels.sym_samples: must be positive");
  require(c.sym_m > 0.0 && c.sym_M >= c.sym_m, "kernels: need 0 < sym_m <= sym_M");
  require(c.sym_c0 > 0.0, "kernels.sym_c0: must be positive");
  require(c.kappa_min > 0.0, "kernels.kappa_min: must be positive");
  for (double e : c.fp_eps) require(e > 0.0 && e <= 1.0, "kernels.fp_eps: values must lie in (0, 1]");
}

RunConfig parse_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  RunConfig c;
  const auto& table = setters();
  std::set<std::string> seen;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + section + "' outside a section");
    for (const auto& [name, value] : body) {
      const std::string key = section + "." + name;
      const auto it = table.find(key);
      if (it == table.end()) throw ConfigError("unknown key '" + key + "'");
      if (!seen.insert(key).second) throw ConfigError("repeated key '" + key + "'");
      it->second(c, key, value.data());
    }
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path);
  return parse_config(f);
}

std::string to_ini(const RunConfig& c) {
  std::ostringstream o;
  o << "[grid]\nd = " << c.d << "\nny = " << c.ny << "\nnz = " << c.nz << "\nL = " << num_text(c.L)
    << "\nH = " << num_text(c.H) << "\n\n[physics]\ng = " << num_text(c.g) << "\neps = " << list_text(c.eps)
    << "\nT = " << num_text(c.T) << "\ndt = " << num_text(c.dt) << "\ncfl = " << num_text(c.cfl)
    << "\n\n[init]\nk = " << num_text(c.k) << "\namplitude = " << num_text(c.amplitude)
    << "\nirrotational = " << (c.irrotational ? "true" : "false") << "\nnoise = " << num_text(c.noise);
  if (!c.checkpoint.empty()) o << "\ncheckpoint = " << c.checkpoint;
  o << "\n\n[cutoff]\nr1 = " << num_text(c.r1) << "\nr2 = " << num_text(c.r2)
    << "\n\n[tolerances]\ndiv = " << num_text(c.div_tol) << "\nbc = " << num_text(c.bc_tol)
    << "\nsolver = " << num_text(c.solver_tol) << "\n\n[numerics]\nfilter_order = " << c.filter_order
    << "\nfilter_strength = " << num_text(c.filter_strength) << "\n\n[monitor]\nm = " << c.m << "\nevery = " << c.every
    << "\ncheckpoint_every = " << c.checkpoint_every << "\n\n[output]\ndir = " << c.out_dir
    << "\njobs = " << c.jobs << "\n\n[run]\nseed = " << c.seed << "\n\n[kernels]\nheat_per_axis = "
    << c.heat_per_axis << "\nheat_gamma_min = " << num_text(c.heat_gamma_min)
    << "\nsym_samples = " << c.sym_samples << "\nsym_m = " << num_text(c.sym_m)
    << "\nsym_M = " << num_text(c.sym_M) << "\nsym_c0 = " << num_text(c.sym_c0)
    << "\nkappa_min = " << num_text(c.kappa_min) << "\nfp_eps = " << list_text(c.fp_eps) << "\n";
  return o.str();
}

}  // namespace fsns
