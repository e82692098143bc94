#include "fsns/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "fsns/error.hpp"

namespace fsns {

namespace {

// The FFTW planner is not thread safe; execution with new-array calls is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct FftPlans {
  struct Pair {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
  };

  FftPlans(int d, int nx, int ny) : d(d), nx(nx), ny(ny) {}
  ~FftPlans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    for (auto& [levels, p] : cache) {
      fftw_destroy_plan(p.fwd);
      fftw_destroy_plan(p.inv);
    }
  }

  const Pair& get(int levels) const {
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto it = cache.find(levels);
    if (it != cache.end()) return it->second;
    const int nh = d == 1 ? nx : nx * ny;
    const int nhc = d == 1 ? nx / 2 + 1 : nx * (ny / 2 + 1);
    int dims[2] = {nx, ny};
    double* rbuf = fftw_alloc_real(static_cast<std::size_t>(nh) * levels);
    fftw_complex* cbuf = fftw_alloc_complex(static_cast<std::size_t>(nhc) * levels);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Pair p;
    p.fwd = fftw_plan_many_dft_r2c(d, dims, levels, rbuf, nullptr, 1, nh, cbuf, nullptr, 1, nhc,
                                   flags);
    p.inv = fftw_plan_many_dft_c2r(d, dims, levels, cbuf, nullptr, 1, nhc, rbuf, nullptr, 1, nh,
                                   flags);
    fftw_free(rbuf);
    fftw_free(cbuf);
    return cache.emplace(levels, p).first->second;
  }

  int d, nx, ny;
  mutable std::map<int, Pair> cache;
};

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::vector<double> cheb_nodes(int n) {
  std::vector<double> x(n + 1);
  for (int j = 0; j <= n; ++j) x[j] = std::cos(std::numbers::pi * j / n);
  return x;
}

RowMatrix cheb_matrix(int n) {
  const auto x = cheb_nodes(n);
  RowMatrix dm = RowMatrix::Zero(n + 1, n + 1);
  auto c = [n](int i) { return (i == 0 || i == n) ? 2.0 : 1.0; };
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      dm(i, j) = c(i) / c(j) * sign / (x[i] - x[j]);
    }
  }
  // Negative-sum trick for the diagonal.
  for (int i = 0; i <= n; ++i) {
    double s = 0.0;
    for (int j = 0; j <= n; ++j)
      if (j != i) s += dm(i, j);
    dm(i, i) = -s;
  }
  return dm;
}

std::vector<double> clenshaw_curtis(int n) {
  std::vector<double> w(n + 1, 0.0);
  const double pi = std::numbers::pi;
  std::vector<double> v(n - 1 > 0 ? n - 1 : 0, 1.0);
  if (n % 2 == 0) {
    w[0] = w[n] = 1.0 / (n * n - 1.0);
    for (int k = 1; k < n / 2; ++k)
      for (int j = 1; j < n; ++j) v[j - 1] -= 2.0 * std::cos(2.0 * k * pi * j / n) / (4.0 * k * k - 1);
    for (int j = 1; j < n; ++j) v[j - 1] -= std::cos(n * pi * j / n) / (n * n - 1.0);
  } else {
    w[0] = w[n] = 1.0 / (n * n);
    for (int k = 1; k <= (n - 1) / 2; ++k)
      for (int j = 1; j < n; ++j) v[j - 1] -= 2.0 * std::cos(2.0 * k * pi * j / n) / (4.0 * k * k - 1);
  }
  for (int j = 1; j < n; ++j) w[j] = 2.0 * v[j - 1] / n;
  return w;
}

void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
  x.assign(m, 0.0);
  w.assign(m, 0.0);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) p0 = 1.0;
      dp = m * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    x[i] = -t;
    x[m - 1 - i] = t;
    w[i] = w[m - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

RowMatrix cheb_interp_matrix(int n, const std::vector<double>& t) {
  const auto x = cheb_nodes(n);
  std::vector<double> bw(n + 1);
  for (int j = 0; j <= n; ++j) bw[j] = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == n) ? 0.5 : 1.0);
  RowMatrix m = RowMatrix::Zero(static_cast<int>(t.size()), n + 1);
  for (std::size_t q = 0; q < t.size(); ++q) {
    int hit = -1;
    for (int j = 0; j <= n; ++j)
      if (t[q] == x[j]) hit = j;
    if (hit >= 0) {
      m(q, hit) = 1.0;
      continue;
    }
    double den = 0.0;
    for (int j = 0; j <= n; ++j) den += bw[j] / (t[q] - x[j]);
    for (int j = 0; j <= n; ++j) m(q, j) = bw[j] / (t[q] - x[j]) / den;
  }
  return m;
}

Grid::Grid(const GridSpec& spec) : spec_(spec) {
  if (spec.d != 1 && spec.d != 2) throw ShapeError("horizontal dimension must be 1 or 2");
  if (spec.d == 1) spec_.ny = 1;
  if (!is_power_of_two(spec.nx) || spec.nx < 4) throw ShapeError("nx must be a power of two >= 4");
  if (spec.d == 2 && (!is_power_of_two(spec.ny) || spec.ny < 4))
    throw ShapeError("ny must be a power of two >= 4");
  if (spec.nz < 2) throw ShapeError("nz must be at least 2");
  if (!(spec.depth > 0) || !(spec.lx > 0) || !(spec.ly > 0))
    throw ShapeError("lengths must be positive");

  const int nx = spec_.nx, ny = spec_.ny;
  nl_ = spec_.nz + 1;
  nh_ = spec_.d == 1 ? nx : nx * ny;
  nhc_ = spec_.d == 1 ? nx / 2 + 1 : nx * (ny / 2 + 1);
  cell_area_ = spec_.d == 1 ? spec_.lx / nx : spec_.lx * spec_.ly / (nx * ny);

  const double hh = 0.5 * spec_.depth;
  const auto x = cheb_nodes(spec_.nz);
  z_.resize(nl_);
  for (int l = 0; l < nl_; ++l) z_[l] = hh * (x[l] - 1.0);
  wz_ = clenshaw_curtis(spec_.nz);
  for (auto& w : wz_) w *= hh;
  d_ = cheb_matrix(spec_.nz) / hh;
  dt_ = d_.transpose();

  const double two_pi = 2.0 * std::numbers::pi;
  k_.assign(spec_.d, std::vector<double>(nhc_));
  kd_.assign(spec_.d, std::vector<double>(nhc_));
  k2_.assign(nhc_, 0.0);
  mult_.assign(nhc_, 2.0);
  if (spec_.d == 1) {
    for (int c = 0; c < nhc_; ++c) {
      k_[0][c] = two_pi * c / spec_.lx;
      kd_[0][c] = (c == nx / 2) ? 0.0 : k_[0][c];
      if (c == 0 || c == nx / 2) mult_[c] = 1.0;
    }
  } else {
    const int nyc = ny / 2 + 1;
    for (int i = 0; i < nx; ++i) {
      const int m = i <= nx / 2 ? i : i - nx;
      for (int j = 0; j < nyc; ++j) {
        const int c = i * nyc + j;
        k_[0][c] = two_pi * m / spec_.lx;
        kd_[0][c] = (i == nx / 2) ? 0.0 : k_[0][c];
        k_[1][c] = two_pi * j / spec_.ly;
        kd_[1][c] = (j == ny / 2) ? 0.0 : k_[1][c];
        mult_[c] = (j == 0 || j == ny / 2) ? 1.0 : 2.0;
      }
    }
  }
  for (int c = 0; c < nhc_; ++c)
    for (int a = 0; a < spec_.d; ++a) k2_[c] += k_[a][c] * k_[a][c];

  plans_ = std::make_shared<FftPlans>(spec_.d, nx, ny);
}

double Grid::coord(int a, int j) const {
  if (spec_.d == 1) return spec_.lx * j / spec_.nx;
  if (a == 0) return spec_.lx * (j / spec_.ny) / spec_.nx;
  return spec_.ly * (j % spec_.ny) / spec_.ny;
}

Spectrum Grid::forward(const double* in, int levels) const {
  Spectrum out(static_cast<std::size_t>(nhc_) * levels);
  const auto& p = plans_->get(levels);
  fftw_execute_dft_r2c(p.fwd, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

void Grid::inverse(const cplx* in, double* out, int levels) const {
  // c2r overwrites its input.
  Spectrum tmp(in, in + static_cast<std::size_t>(nhc_) * levels);
  const auto& p = plans_->get(levels);
  fftw_execute_dft_c2r(p.inv, reinterpret_cast<fftw_complex*>(tmp.data()), out);
  const double s = 1.0 / nh_;
  const std::size_t n = static_cast<std::size_t>(nh_) * levels;
  for (std::size_t i = 0; i < n; ++i) out[i] *= s;
}

Spectrum Grid::forward(const Field& f) const {
  if (f.size() % nh_ != 0) throw ShapeError("field length is not a multiple of nh");
  return forward(f.data(), static_cast<int>(f.size() / nh_));
}

Field Grid::inverse(const Spectrum& s) const {
  if (s.size() % nhc_ != 0) throw ShapeError("spectrum length is not a multiple of nhc");
  const int levels = static_cast<int>(s.size() / nhc_);
  Field out(static_cast<std::size_t>(levels) * nh_);
  inverse(s.data(), out.data(), levels);
  return out;
}

Field Grid::dh(const Field& f, int a) const {
  if (a < 0 || a >= spec_.d) throw DomainError("invalid horizontal direction");
  Spectrum s = forward(f);
  const int levels = static_cast<int>(s.size() / nhc_);
  for (int l = 0; l < levels; ++l)
    for (int c = 0; c < nhc_; ++c) s[l * nhc_ + c] *= cplx(0.0, kd_[a][c]);
  return inverse(s);
}

std::vector<Field> Grid::grad_h(const Field& f) const {
  const Spectrum s = forward(f);
  const int levels = static_cast<int>(s.size() / nhc_);
  std::vector<Field> out;
  for (int a = 0; a < spec_.d; ++a) {
    Spectrum t(s.size());
    for (int l = 0; l < levels; ++l)
      for (int c = 0; c < nhc_; ++c) t[l * nhc_ + c] = s[l * nhc_ + c] * cplx(0.0, kd_[a][c]);
    out.push_back(inverse(t));
  }
  return out;
}

Field apply_matrix(const RowMatrix& m, const Field& f, int nh, Exec ex) {
  const int rows = static_cast<int>(m.rows()), cols = static_cast<int>(m.cols());
  if (f.size() != static_cast<std::size_t>(cols) * nh) throw ShapeError("apply_matrix: size");
  Field out(static_cast<std::size_t>(rows) * nh, 0.0);
  if (ex == Exec::parallel) {
    // Blocked product; Eigen threads it through OpenMP.
    Eigen::Map<const RowMatrix> src(f.data(), cols, nh);
    Eigen::Map<RowMatrix> dst(out.data(), rows, nh);
    dst.noalias() = m * src;
    return out;
  }
  for (int l = 0; l < rows; ++l) {
    double* o = out.data() + static_cast<std::size_t>(l) * nh;
    for (int q = 0; q < cols; ++q) {
      const double c = m(l, q);
      const double* src = f.data() + static_cast<std::size_t>(q) * nh;
      for (int j = 0; j < nh; ++j) o[j] += c * src[j];
    }
  }
  return out;
}

Field Grid::dz(const Field& f, Exec ex) const {
  if (f.size() != size()) throw ShapeError("dz: field size mismatch");
  return apply_matrix(d_, f, nh_, ex);
}

Field Grid::dz_t(const Field& f, Exec ex) const {
  if (f.size() != size()) throw ShapeError("dz_t: field size mismatch");
  return apply_matrix(dt_, f, nh_, ex);
}

double Grid::integrate(const Field& f) const {
  if (f.size() != size()) throw ShapeError("integrate: field size mismatch");
  double s = 0.0;
  for (int l = 0; l < nl_; ++l) {
    double row = 0.0;
    for (int j = 0; j < nh_; ++j) row += f[static_cast<std::size_t>(l) * nh_ + j];
    s += wz_[l] * row;
  }
  return s * cell_area_;
}

double Grid::dot(const Field& f, const Field& g) const {
  if (f.size() != size() || g.size() != size()) throw ShapeError("dot: field size mismatch");
  double s = 0.0;
  for (int l = 0; l < nl_; ++l) {
    double row = 0.0;
    for (int j = 0; j < nh_; ++j) {
      const std::size_t i = static_cast<std::size_t>(l) * nh_ + j;
      row += f[i] * g[i];
    }
    s += wz_[l] * row;
  }
  return s * cell_area_;
}

double Grid::l2(const Field& f) const { return std::sqrt(std::max(0.0, dot(f, f))); }

double Grid::integrate_level(const double* f) const {
  double s = 0.0;
  for (int j = 0; j < nh_; ++j) s += f[j];
  return s * cell_area_;
}

}  // namespace fsns
