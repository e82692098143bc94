#pragma once

#include <functional>
#include <vector>

namespace fsns {

using Vec = std::vector<double>;
using LinOp = std::function<void(const Vec& x, Vec& y)>;

struct KrylovResult {
  int iterations = 0;
  double residual = 0.0;  // relative to |b|
  bool converged = false;
};

/// Preconditioned conjugate gradients; x holds the initial guess.
KrylovResult pcg(const LinOp& a, const LinOp& m_inv, const Vec& b, Vec& x, double tol,
                 int max_iter);

/// Restarted GMRES with right preconditioning; x holds the initial guess.
KrylovResult gmres(const LinOp& a, const LinOp& m_inv, const Vec& b, Vec& x, double tol,
                   int max_iter, int restart = 30);

double vdot(const Vec& a, const Vec& b);
double vnorm(const Vec& a);

}  // namespace fsns
