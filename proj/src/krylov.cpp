#include "fsns/krylov.hpp"

#include <cmath>

namespace fsns {

double vdot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double vnorm(const Vec& a) { return std::sqrt(vdot(a, a)); }

KrylovResult pcg(const LinOp& a, const LinOp& m_inv, const Vec& b, Vec& x, double tol,
                 int max_iter) {
  const std::size_t n = b.size();
  KrylovResult res;
  const double bn = vnorm(b);
  if (bn == 0.0) {
    x.assign(n, 0.0);
    res.converged = true;
    return res;
  }
  Vec r(n), z(n), p(n), ap(n);
  a(x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  res.residual = vnorm(r) / bn;
  if (res.residual <= tol) {
    res.converged = true;
    return res;
  }
  m_inv(r, z);
  p = z;
  double rz = vdot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    a(p, ap);
    const double pap = vdot(p, ap);
    if (!(pap > 0.0)) {
      res.iterations = it;
      return res;
    }
    const double alpha = rz / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    res.iterations = it;
    res.residual = vnorm(r) / bn;
    if (res.residual <= tol) {
      res.converged = true;
      return res;
    }
    m_inv(r, z);
    const double rz_new = vdot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return res;
}

KrylovResult gmres(const LinOp& a, const LinOp& m_inv, const Vec& b, Vec& x, double tol,
                   int max_iter, int restart) {
  const std::size_t n = b.size();
  KrylovResult res;
  const double bn = vnorm(b);
  if (bn == 0.0) {
    x.assign(n, 0.0);
    res.converged = true;
    return res;
  }
  Vec r(n), w(n), z(n);
  int total = 0;
  while (total < max_iter) {
    a(x, w);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
    double beta = vnorm(r);
    res.residual = beta / bn;
    if (res.residual <= tol) {
      res.converged = true;
      return res;
    }
    const int m = restart;
    std::vector<Vec> v(m + 1, Vec(n)), zs(m, Vec(n));
    std::vector<std::vector<double>> h(m + 1, std::vector<double>(m, 0.0));
    std::vector<double> cs(m), sn(m), g(m + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    g[0] = beta;
    int k = 0;
    for (; k < m && total < max_iter; ++k) {
      ++total;
      m_inv(v[k], zs[k]);
      a(zs[k], w);
      // Modified Gram-Schmidt.
      for (int j = 0; j <= k; ++j) {
        h[j][k] = vdot(w, v[j]);
        for (std::size_t i = 0; i < n; ++i) w[i] -= h[j][k] * v[j][i];
      }
      h[k + 1][k] = vnorm(w);
      if (h[k + 1][k] > 0.0)
        for (std::size_t i = 0; i < n; ++i) v[k + 1][i] = w[i] / h[k + 1][k];
      for (int j = 0; j < k; ++j) {
        const double t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
        h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
        h[j][k] = t;
      }
      const double den = std::hypot(h[k][k], h[k + 1][k]);
      cs[k] = den > 0.0 ? h[k][k] / den : 1.0;
      sn[k] = den > 0.0 ? h[k + 1][k] / den : 0.0;
      h[k][k] = den;
      h[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      res.iterations = total;
      res.residual = std::abs(g[k + 1]) / bn;
      if (res.residual <= tol) {
        ++k;
        break;
      }
    }
    // Back substitution and update x += Z y.
    std::vector<double> y(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= h[i][j] * y[j];
      y[i] = s / h[i][i];
    }
    for (int j = 0; j < k; ++j)
      for (std::size_t i = 0; i < n; ++i) x[i] += y[j] * zs[j][i];
    if (res.residual <= tol) {
      // Confirm with the true residual.
      a(x, w);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
      res.residual = vnorm(r) / bn;
      if (res.residual <= tol * 10.0) {
        res.converged = true;
        return res;
      }
    }
  }
  return res;
}

}  // namespace fsns
