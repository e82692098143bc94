#pragma once

#include <map>
#include <string>
#include <vector>

#include "fsns/geometry.hpp"
#include "fsns/grid.hpp"

namespace fsns {

/// Exponents of Z1, Z2 (horizontal) and Z3 = z/(1-z) d_z.
struct ConormalMultiIndex {
  int a1 = 0, a2 = 0, a3 = 0;
  int order() const { return a1 + a2 + a3; }
  bool operator==(const ConormalMultiIndex&) const = default;
};

/// All multi-indices with |alpha| <= m; a2 stays 0 when d = 1.
/// Ordered by total order, then lexicographically.
std::vector<ConormalMultiIndex> multi_indices(int d, int m);

/// (sum_xi (1 + |xi|^2)^s |h_hat(xi)|^2)^(1/2) with the torus Parseval
/// normalisation, so s = 0 gives the grid L2 norm.
double boundary_norm(const SurfaceState& h, double s, const Grid& grid);
double boundary_norm(const Field& h, double s, const Grid& grid);

/// Z_i f; i in {1, .., d} are horizontal spectral derivatives, i = 3 is
/// the weighted vertical derivative.
Field conormal_derivative(const Field& f, int i, const Grid& grid);

/// Z^alpha f.
Field apply_multi_index(const Field& f, const ConormalMultiIndex& alpha, const Grid& grid);

/// All Z^alpha f for |alpha| <= m, in multi_indices() order.
std::vector<Field> conormal_family(const Field& f, int m, const Grid& grid);

/// ||f||_m with the flat measure dy dz.
double conormal_norm(const Field& f, int m, const Grid& grid);
/// Sum of squared component norms for a vector field.
double conormal_norm_sq(const std::vector<Field>& v, int m, const Grid& grid);

/// sum_{|alpha| <= k} ||Z^alpha f||_inf.
double conormal_sup_norm(const Field& f, int k, const Grid& grid);

/// ||f||_E^m = (||f||_m^2 + ||d_z f||_{m-1}^2)^(1/2).
double em_norm(const Field& f, int m, const Grid& grid);

/// Fractional tangential norm: boundary multiplier on each level, then
/// integrated in z.
double tangential_norm(const Field& f, double s, const Grid& grid);

/// (gamma^2 + tau^2 + |sqrt(eps) xi|^4)^(1/4).
double anisotropic_weight(double gamma, double tau, double xi, double eps);

/// Named nonnegative norm values with a stable CSV column order.
class NormReport {
 public:
  void set(const std::string& tag, double value);
  double get(const std::string& tag) const;
  bool has(const std::string& tag) const { return values_.count(tag) > 0; }
  const std::vector<std::string>& tags() const { return order_; }
  std::string csv_header() const;
  std::string csv_row() const;

 private:
  std::vector<std::string> order_;
  std::map<std::string, double> values_;
};

/// Standard report for a scalar field and a surface.
NormReport norm_report(const Field& f, const SurfaceState& h, int m, const Grid& grid);

}  // namespace fsns
