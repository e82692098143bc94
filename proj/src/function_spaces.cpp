#include "fsns/function_spaces.hpp"

#include <algorithm>
#include <cmath>

#include "fsns/csv.hpp"
#include "fsns/error.hpp"

namespace fsns {

std::vector<ConormalMultiIndex> multi_indices(int d, int m) {
  std::vector<ConormalMultiIndex> out;
  for (int k = 0; k <= m; ++k)
    for (int a1 = k; a1 >= 0; --a1)
      for (int a2 = (d == 2 ? k - a1 : 0); a2 >= 0; --a2) {
        const int a3 = k - a1 - a2;
        if (a3 < 0) continue;
        out.push_back({a1, a2, a3});
      }
  return out;
}

double boundary_norm(const Field& h, double s, const Grid& grid) {
  if (static_cast<int>(h.size()) != grid.nh()) throw ShapeError("boundary_norm: size");
  const Spectrum hh = grid.forward(h.data(), 1);
  const double inv = 1.0 / grid.nh();
  double sum = 0.0;
  for (int c = 0; c < grid.nhc(); ++c)
    sum += grid.multiplicity(c) * std::pow(1.0 + grid.k2(c), s) * std::norm(hh[c] * inv);
  return std::sqrt(grid.area() * sum);
}

double boundary_norm(const SurfaceState& h, double s, const Grid& grid) {
  return boundary_norm(h.h, s, grid);
}

namespace {

Field z3(const Field& f, const Grid& grid) {
  Field out = grid.dz(f);
  const int nh = grid.nh();
  for (int l = 0; l < grid.nl(); ++l) {
    const double z = grid.z()[l];
    const double w = z / (1.0 - z);
    for (int j = 0; j < nh; ++j) out[static_cast<std::size_t>(l) * nh + j] *= w;
  }
  return out;
}

}  // namespace

Field conormal_derivative(const Field& f, int i, const Grid& grid) {
  if (f.size() != grid.size()) throw ShapeError("conormal_derivative: size");
  if (i == 3) return z3(f, grid);
  if (i >= 1 && i <= grid.d()) return grid.dh(f, i - 1);
  throw DomainError("conormal_derivative: invalid index");
}

Field apply_multi_index(const Field& f, const ConormalMultiIndex& alpha, const Grid& grid) {
  Field g = f;
  for (int k = 0; k < alpha.a1; ++k) g = grid.dh(g, 0);
  for (int k = 0; k < alpha.a2; ++k) g = grid.dh(g, 1);
  for (int k = 0; k < alpha.a3; ++k) g = z3(g, grid);
  return g;
}

std::vector<Field> conormal_family(const Field& f, int m, const Grid& grid) {
  const auto idx = multi_indices(grid.d(), m);
  std::vector<Field> out;
  out.reserve(idx.size());
  // Reuse the parent obtained by lowering the last nonzero exponent.
  for (const auto& a : idx) {
    if (a.order() == 0) {
      out.push_back(f);
      continue;
    }
    ConormalMultiIndex parent = a;
    int step;
    if (a.a3 > 0) {
      --parent.a3;
      step = 3;
    } else if (a.a2 > 0) {
      --parent.a2;
      step = 2;
    } else {
      --parent.a1;
      step = 1;
    }
    const auto it = std::find(idx.begin(), idx.end(), parent);
    const Field& base = out[static_cast<std::size_t>(it - idx.begin())];
    out.push_back(conormal_derivative(base, step, grid));
  }
  return out;
}

double conormal_norm(const Field& f, int m, const Grid& grid) {
  if (m < 0) throw DomainError("conormal_norm: negative order");
  double s = 0.0;
  for (const auto& g : conormal_family(f, m, grid)) s += grid.dot(g, g);
  return std::sqrt(s);
}

double conormal_norm_sq(const std::vector<Field>& v, int m, const Grid& grid) {
  double s = 0.0;
  for (const auto& c : v) {
    const double n = conormal_norm(c, m, grid);
    s += n * n;
  }
  return s;
}

double conormal_sup_norm(const Field& f, int k, const Grid& grid) {
  double s = 0.0;
  for (const auto& g : conormal_family(f, k, grid)) {
    double m = 0.0;
    for (double x : g) m = std::max(m, std::abs(x));
    s += m;
  }
  return s;
}

double em_norm(const Field& f, int m, const Grid& grid) {
  if (m < 1) throw DomainError("em_norm: order must be >= 1");
  const double a = conormal_norm(f, m, grid);
  const double b = conormal_norm(grid.dz(f), m - 1, grid);
  return std::sqrt(a * a + b * b);
}

double tangential_norm(const Field& f, double s, const Grid& grid) {
  if (f.size() != grid.size()) throw ShapeError("tangential_norm: size");
  const Spectrum fh = grid.forward(f);
  const int nhc = grid.nhc();
  const double inv = 1.0 / grid.nh();
  double total = 0.0;
  for (int l = 0; l < grid.nl(); ++l) {
    double lev = 0.0;
    for (int c = 0; c < nhc; ++c)
      lev += grid.multiplicity(c) * std::pow(1.0 + grid.k2(c), s) *
             std::norm(fh[static_cast<std::size_t>(l) * nhc + c] * inv);
    total += grid.wz()[l] * lev;
  }
  return std::sqrt(grid.area() * total);
}

double anisotropic_weight(double gamma, double tau, double xi, double eps) {
  const double x2 = eps * xi * xi;
  return std::pow(gamma * gamma + tau * tau + x2 * x2, 0.25);
}

void NormReport::set(const std::string& tag, double value) {
  if (!std::isfinite(value) || value < 0.0) throw DomainError("norm report entry " + tag + " invalid");
  if (!values_.count(tag)) order_.push_back(tag);
  values_[tag] = value;
}

double NormReport::get(const std::string& tag) const {
  const auto it = values_.find(tag);
  if (it == values_.end()) throw DomainError("norm report has no entry " + tag);
  return it->second;
}

std::string NormReport::csv_header() const { return csv_join(order_); }

std::string NormReport::csv_row() const {
  std::vector<std::string> cells;
  for (const auto& t : order_) cells.push_back(fmt_double(values_.at(t)));
  return csv_join(cells);
}

NormReport norm_report(const Field& f, const SurfaceState& h, int m, const Grid& grid) {
  NormReport r;
  r.set("L2", grid.l2(f));
  r.set("H^m_co", conormal_norm(f, m, grid));
  r.set("E^m", em_norm(f, std::max(m, 1), grid));
  r.set("W^{1,inf}_co", conormal_sup_norm(f, 1, grid));
  r.set("|h|_m", boundary_norm(h, m, grid));
  r.set("|h|_{m+1/2}", boundary_norm(h, m + 0.5, grid));
  return r;
}

}  // namespace fsns
