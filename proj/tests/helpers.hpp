#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "fsns/grid.hpp"

namespace fsns::test {

/// Samples f(x, z) (d = 1) on every grid node.
inline Field sample(const Grid& g, const std::function<double(double, double)>& f) {
  Field out(g.size());
  for (int l = 0; l < g.nl(); ++l)
    for (int j = 0; j < g.nh(); ++j) out[static_cast<std::size_t>(l) * g.nh() + j] = f(g.coord(0, j), g.z()[l]);
  return out;
}

/// Samples f(x, y, z) on a d = 2 grid.
inline Field sample3(const Grid& g, const std::function<double(double, double, double)>& f) {
  Field out(g.size());
  for (int l = 0; l < g.nl(); ++l)
    for (int j = 0; j < g.nh(); ++j)
      out[static_cast<std::size_t>(l) * g.nh() + j] = f(g.coord(0, j), g.coord(1, j), g.z()[l]);
  return out;
}

inline Field sample_surface(const Grid& g, const std::function<double(double)>& f) {
  Field out(g.nh());
  for (int j = 0; j < g.nh(); ++j) out[j] = f(g.coord(0, j));
  return out;
}

inline double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const Field& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

/// Random band-limited surface with modes 1..kmax and given seed.
inline Field random_surface(const Grid& g, int kmax, double amp, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> ca(kmax + 1), sa(kmax + 1);
  for (int k = 1; k <= kmax; ++k) {
    ca[k] = u(rng);
    sa[k] = u(rng);
  }
  const double L = g.spec().lx;
  return sample_surface(g, [&](double x) {
    double s = 0.0;
    for (int k = 1; k <= kmax; ++k) {
      const double q = 2.0 * M_PI * k / L;
      s += amp * (ca[k] * std::cos(q * x) + sa[k] * std::sin(q * x)) / (k * k);
    }
    return s;
  });
}

}  // namespace fsns::test
