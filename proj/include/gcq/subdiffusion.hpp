#pragma once

// Time-fractional subdiffusion solver
//
//   D_t^alpha u + A u = f,   u(0) = u0,   alpha in (0, 1),
//
// with A the Dirichlet Laplacian on (-1, 1) discretized by piecewise-linear
// finite elements (or a positive scalar), advanced by the generalized
// convolution quadrature on an arbitrary time mesh.  Writing v = u - u0 and
// expressing the Caputo derivative through the first-order difference,
// D^alpha = D^{alpha-1} D, the discrete scheme at step n is
//
//   sum_{j<=n} w_{n,j} M dv_j + S v_n = M f(t_n) - S u0,
//   dv_j = (v_j - v_{j-1}) / tau_j,
//
// where w_{n,j} are the quadrature weights of the kernel z^{alpha-1}.  The
// diagonal weight satisfies w_{n,n}/tau_n = tau_n^{-alpha}, so each step
// solves the shifted symmetric system
//
//   (tau_n^{-alpha} M + S) v_n = M f(t_n) - S u0 + tau_n^{-alpha} M v_{n-1}
//                                - sum_{j<n} w_{n,j} M dv_j,
//
// with the off-diagonal sum evaluated by the fast history/local splitting
// carrying mass-weighted difference samples M dv_j.
//
// For initial data outside the domain of A the solution is assembled as
// u(t) = E(t) u0 + (K(d_t) f)(t): the homogeneous part by numerical
// inversion of its Laplace transform E^(z) = z^{alpha-1}(z^alpha M + S)^{-1} M
// on a hyperbolic contour, the source part by the same stepping scheme with
// zero initial data.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gcq/fast.hpp"
#include "gcq/kernels.hpp"
#include "gcq/mesh.hpp"
#include "gcq/special_functions.hpp"

namespace gcq {

// ---------------------------------------------------------------------------
// Tridiagonal linear algebra
// ---------------------------------------------------------------------------

// LU factorization of a tridiagonal matrix with partial pivoting (row
// interchanges fill a second superdiagonal).  The complex shifted systems of
// the Laplace inversion are not diagonally dominant, so plain elimination is
// not safe here.
template <typename T>
struct TridiagFactor {
  int n = 0;
  std::vector<T> dl, d, du, du2;
  std::vector<int> swapped;

  TridiagFactor() = default;

  // sub/super have length n-1
  TridiagFactor(std::vector<T> sub, std::vector<T> diag, std::vector<T> super)
      : n(static_cast<int>(diag.size())),
        dl(std::move(sub)),
        d(std::move(diag)),
        du(std::move(super)) {
    if (static_cast<int>(dl.size()) != n - 1 || static_cast<int>(du.size()) != n - 1)
      throw std::invalid_argument("TridiagFactor: inconsistent band lengths");
    du2.assign(std::max(0, n - 2), T(0));
    swapped.assign(std::max(0, n - 1), 0);
    for (int i = 0; i < n - 1; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] == T(0)) throw std::runtime_error("TridiagFactor: zero pivot");
        T fact = dl[i] / d[i];
        dl[i] = fact;
        d[i + 1] -= fact * du[i];
      } else {
        T fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        T temp = d[i + 1];
        d[i + 1] = du[i] - fact * temp;
        du[i] = temp;
        if (i < n - 2) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du2[i];
        }
        swapped[i] = 1;
      }
    }
    if (n > 0 && d[n - 1] == T(0)) throw std::runtime_error("TridiagFactor: zero pivot");
  }

  void solve_in_place(std::vector<T>& b) const {
    if (static_cast<int>(b.size()) != n)
      throw std::invalid_argument("TridiagFactor: rhs length mismatch");
    for (int i = 0; i < n - 1; ++i) {
      if (!swapped[i]) {
        b[i + 1] -= dl[i] * b[i];
      } else {
        T temp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = temp - dl[i] * b[i];
      }
    }
    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (int i = n - 3; i >= 0; --i)
      b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
  }
};

// y = T x for a symmetric tridiagonal matrix given by (diag, off)
template <typename T, typename S>
void tridiag_apply(const std::vector<S>& diag, const std::vector<S>& off,
                   const std::vector<T>& x, std::vector<T>& y) {
  const int n = static_cast<int>(diag.size());
  y.resize(n);
  for (int i = 0; i < n; ++i) {
    T acc = diag[i] * x[i];
    if (i > 0) acc += off[i - 1] * x[i - 1];
    if (i + 1 < n) acc += off[i] * x[i + 1];
    y[i] = acc;
  }
}

// ---------------------------------------------------------------------------
// Finite elements on (-1, 1)
// ---------------------------------------------------------------------------

// Piecewise-linear elements on the uniform partition of (-1, 1) into
// `intervals` cells, homogeneous Dirichlet conditions; only interior nodes
// are kept.  Both matrices are symmetric tridiagonal.
struct FemSystem {
  int intervals = 0;
  int nx = 0;       // interior node count = intervals - 1
  double dx = 0.0;  // cell width
  std::vector<double> mass_diag, mass_off;    // (dx/6) tridiag(1, 4, 1)
  std::vector<double> stiff_diag, stiff_off;  // (1/dx) tridiag(-1, 2, -1)

  double node(int i) const { return -1.0 + (i + 1) * dx; }  // i = 0..nx-1
};

inline FemSystem fem_assemble(int intervals) {
  if (intervals < 2) throw std::invalid_argument("fem_assemble: at least two intervals");
  FemSystem fem;
  fem.intervals = intervals;
  fem.nx = intervals - 1;
  fem.dx = 2.0 / intervals;
  fem.mass_diag.assign(fem.nx, 4.0 * fem.dx / 6.0);
  fem.mass_off.assign(fem.nx - 1, fem.dx / 6.0);
  fem.stiff_diag.assign(fem.nx, 2.0 / fem.dx);
  fem.stiff_off.assign(fem.nx - 1, -1.0 / fem.dx);
  return fem;
}

inline std::vector<double> mass_apply(const FemSystem& fem, const std::vector<double>& x) {
  std::vector<double> y;
  tridiag_apply(fem.mass_diag, fem.mass_off, x, y);
  return y;
}

inline std::vector<double> stiffness_apply(const FemSystem& fem,
                                           const std::vector<double>& x) {
  std::vector<double> y;
  tridiag_apply(fem.stiff_diag, fem.stiff_off, x, y);
  return y;
}

inline double l2_norm(const FemSystem& fem, const std::vector<double>& v) {
  std::vector<double> mv;
  tridiag_apply(fem.mass_diag, fem.mass_off, v, mv);
  double s = 0.0;
  for (int i = 0; i < fem.nx; ++i) s += v[i] * mv[i];
  return std::sqrt(std::max(0.0, s));
}

// || numeric - nodal interpolant of exact ||_{L2} through the mass matrix
template <typename Fn>
double l2_error(const FemSystem& fem, const std::vector<double>& numeric, Fn&& exact) {
  std::vector<double> e(fem.nx);
  for (int i = 0; i < fem.nx; ++i) e[i] = numeric[i] - exact(fem.node(i));
  return l2_norm(fem, e);
}

// interpolation-free || u_h - exact ||_{L2}: elementwise Gauss quadrature of
// the squared difference against the piecewise-linear u_h (zero at the walls)
template <typename Fn>
double l2_error_quad(const FemSystem& fem, const std::vector<double>& numeric, Fn&& exact,
                     int order = 6) {
  GaussRule gl = gauss_legendre(order);
  double s = 0.0;
  for (int cell = 0; cell < fem.intervals; ++cell) {
    double xl = -1.0 + cell * fem.dx, xr = xl + fem.dx;
    double vl = cell == 0 ? 0.0 : numeric[cell - 1];
    double vr = cell == fem.intervals - 1 ? 0.0 : numeric[cell];
    for (std::size_t g = 0; g < gl.nodes.size(); ++g) {
      double x = 0.5 * (xl + xr) + 0.5 * fem.dx * gl.nodes[g];
      double lam = (x - xl) / fem.dx;
      double diff = (1.0 - lam) * vl + lam * vr - exact(x);
      s += 0.5 * fem.dx * gl.weights[g] * diff * diff;
    }
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Laplace inversion of the homogeneous part
// ---------------------------------------------------------------------------

struct IltOptions {
  double sigma = std::numbers::pi / 4.0;
  double d = std::numbers::pi / 6.0;
  int J = 50;
};

namespace subdiff_detail {

struct IltContour {
  double h = 0.0;
  double mu = 0.0;
};

inline IltContour ilt_contour(double t, const IltOptions& opt) {
  if (!(t > 0.0)) throw std::domain_error("laplace_invert_E: t > 0 required");
  const double theta = 1.0 - 1.0 / opt.J;
  const double a = std::acosh(1.0 / ((1.0 - theta) * std::sin(opt.sigma)));
  IltContour c;
  c.h = a / opt.J;
  c.mu = 2.0 * std::numbers::pi * opt.d * opt.J * (1.0 - theta) / (t * a);
  return c;
}

}  // namespace subdiff_detail

// E(t) u0 for E^(z) = z^{alpha-1} (z^alpha M + S)^{-1} M: trapezoid sum on
// the hyperbolic contour z = mu (1 - sin(sigma + i s)), one fresh contour
// per time (mu scales with 1/t).  Conjugate symmetry halves the work.
inline std::vector<double> laplace_invert_E(double alpha, const FemSystem& fem,
                                            const std::vector<double>& u0, double t,
                                            IltOptions opt = {}) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("laplace_invert_E: alpha must lie in (0, 1]");
  auto contour = subdiff_detail::ilt_contour(t, opt);
  std::vector<double> mu0;
  tridiag_apply(fem.mass_diag, fem.mass_off, u0, mu0);

  using C = std::complex<double>;
  const C i1(0.0, 1.0);
  std::vector<double> result(fem.nx, 0.0);
  std::vector<C> rhs(fem.nx), sub(fem.nx - 1), diag(fem.nx), super(fem.nx - 1);
  for (int l = 0; l <= opt.J; ++l) {
    const double s = l * contour.h;
    const C z = contour.mu * (1.0 - std::sin(C(opt.sigma, s)));
    const C za = std::pow(z, C(alpha));
    const C wl = (contour.h * contour.mu / (2.0 * std::numbers::pi)) * std::cos(C(opt.sigma, s));
    for (int i = 0; i < fem.nx; ++i) diag[i] = za * fem.mass_diag[i] + fem.stiff_diag[i];
    for (int i = 0; i + 1 < fem.nx; ++i) {
      sub[i] = za * fem.mass_off[i] + fem.stiff_off[i];
      super[i] = sub[i];
    }
    TridiagFactor<C> lu(sub, diag, super);
    for (int i = 0; i < fem.nx; ++i) rhs[i] = mu0[i];
    lu.solve_in_place(rhs);
    const C c = wl * std::exp(t * z) * std::pow(z, C(alpha - 1.0));
    const double scale = l == 0 ? 1.0 : 2.0;
    for (int i = 0; i < fem.nx; ++i) result[i] += scale * (c * rhs[i]).real();
  }
  return result;
}

// scalar variant: E(t) u0 = E_alpha(-a t^alpha) u0 through the same contour
inline double laplace_invert_E(double alpha, double a, double u0, double t,
                               IltOptions opt = {}) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("laplace_invert_E: alpha must lie in (0, 1]");
  auto contour = subdiff_detail::ilt_contour(t, opt);
  using C = std::complex<double>;
  double result = 0.0;
  for (int l = 0; l <= opt.J; ++l) {
    const double s = l * contour.h;
    const C z = contour.mu * (1.0 - std::sin(C(opt.sigma, s)));
    const C za = std::pow(z, C(alpha));
    const C wl = (contour.h * contour.mu / (2.0 * std::numbers::pi)) * std::cos(C(opt.sigma, s));
    const C c = wl * std::exp(t * z) * std::pow(z, C(alpha - 1.0)) / (za + a) * u0;
    result += (l == 0 ? 1.0 : 2.0) * c.real();
  }
  return result;
}

// ---------------------------------------------------------------------------
// Time stepping
// ---------------------------------------------------------------------------

struct SubdiffusionResult {
  std::vector<std::vector<double>> u;  // snapshots u_0..u_N (nodal values)
  FastDiagnostics diag;
  double max_rel_residual = 0.0;  // shifted-solve residual check, per step
};

struct ScalarSubdiffusionResult {
  std::vector<double> u;  // u_0..u_N
  FastDiagnostics diag;
};

// f_nodal(t) returns the nodal source samples at time t (length fem.nx)
template <typename SourceFn>
SubdiffusionResult solve_smooth(double alpha, const FemSystem& fem,
                                const std::vector<double>& u0, SourceFn&& f_nodal,
                                const TimeMesh& mesh, FastOptions fopt = {}) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("solve_smooth: alpha must lie in (0, 1)");
  if (static_cast<int>(u0.size()) != fem.nx)
    throw std::invalid_argument("solve_smooth: initial data length mismatch");
  const int N = mesh.steps();
  const int nx = fem.nx;

  PowerKernel kernel = frac_derivative_history_kernel(alpha);
  std::vector<double> proto(nx, 0.0);
  GcqConvolution<PowerKernel, std::vector<double>> conv(kernel, mesh, fopt, proto);

  std::vector<double> su0;
  tridiag_apply(fem.stiff_diag, fem.stiff_off, u0, su0);

  SubdiffusionResult out;
  out.u.assign(N + 1, u0);
  std::vector<double> v_prev(nx, 0.0), v(nx), rhs(nx), work(nx), g(nx);
  const auto t_start = std::chrono::steady_clock::now();
  for (int n = 1; n <= N; ++n) {
    const double tau = mesh.tau[n];
    const double shift = conv.diagonal(n) / tau;  // = tau^{-alpha}
    std::vector<double> partial = conv.partial(n);

    std::vector<double> fn = f_nodal(mesh.t[n]);
    if (static_cast<int>(fn.size()) != nx)
      throw std::invalid_argument("solve_smooth: source sample length mismatch");
    tridiag_apply(fem.mass_diag, fem.mass_off, fn, rhs);
    tridiag_apply(fem.mass_diag, fem.mass_off, v_prev, work);
    for (int i = 0; i < nx; ++i) rhs[i] += -su0[i] + shift * work[i] - partial[i];

    std::vector<double> sub(nx - 1), diag(nx), super(nx - 1);
    for (int i = 0; i < nx; ++i) diag[i] = shift * fem.mass_diag[i] + fem.stiff_diag[i];
    for (int i = 0; i + 1 < nx; ++i) super[i] = sub[i] = shift * fem.mass_off[i] + fem.stiff_off[i];
    TridiagFactor<double> lu(sub, diag, super);
    v = rhs;
    lu.solve_in_place(v);

    // residual of the shifted solve (matrix is SPD, must be tiny)
    {
      std::vector<double> mv, sv;
      tridiag_apply(fem.mass_diag, fem.mass_off, v, mv);
      tridiag_apply(fem.stiff_diag, fem.stiff_off, v, sv);
      double rn = 0.0, bn = 0.0;
      for (int i = 0; i < nx; ++i) {
        double ri = shift * mv[i] + sv[i] - rhs[i];
        rn += ri * ri;
        bn += rhs[i] * rhs[i];
      }
      if (bn > 0.0)
        out.max_rel_residual = std::max(out.max_rel_residual, std::sqrt(rn / bn));
    }

    for (int i = 0; i < nx; ++i) g[i] = (v[i] - v_prev[i]) / tau;
    tridiag_apply(fem.mass_diag, fem.mass_off, g, work);
    conv.commit(n, work);

    for (int i = 0; i < nx; ++i) out.u[n][i] = u0[i] + v[i];
    v_prev = v;
  }
  out.diag.NQ_his = conv.history().count();
  out.diag.NQ_loc = conv.NQ_loc();
  out.diag.n0 = conv.n0();
  out.diag.moment_error = conv.history().moment_error;
  out.diag.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return out;
}

// scalar operator A = a > 0: same scheme without the mass matrix
template <typename SourceFn>
ScalarSubdiffusionResult solve_smooth_scalar(double alpha, double a, double u0,
                                             SourceFn&& f, const TimeMesh& mesh,
                                             FastOptions fopt = {}) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("solve_smooth_scalar: alpha must lie in (0, 1)");
  const int N = mesh.steps();
  PowerKernel kernel = frac_derivative_history_kernel(alpha);
  GcqConvolution<PowerKernel, double> conv(kernel, mesh, fopt);

  ScalarSubdiffusionResult out;
  out.u.assign(N + 1, u0);
  double v_prev = 0.0;
  const auto t_start = std::chrono::steady_clock::now();
  for (int n = 1; n <= N; ++n) {
    const double tau = mesh.tau[n];
    const double shift = conv.diagonal(n) / tau;
    const double partial = conv.partial(n);
    const double rhs = f(mesh.t[n]) - a * u0 + shift * v_prev - partial;
    const double v = rhs / (shift + a);
    conv.commit(n, (v - v_prev) / tau);
    out.u[n] = u0 + v;
    v_prev = v;
  }
  out.diag.NQ_his = conv.history().count();
  out.diag.NQ_loc = conv.NQ_loc();
  out.diag.n0 = conv.n0();
  out.diag.moment_error = conv.history().moment_error;
  out.diag.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return out;
}

// Initial data outside the domain of A: u_n = E(t_n) u0 + (K(d_t) f)_n, the
// source part through the zero-initial-data stepping scheme.
template <typename SourceFn>
SubdiffusionResult solve_nonsmooth(double alpha, const FemSystem& fem,
                                   const std::vector<double>& u0, SourceFn&& f_nodal,
                                   const TimeMesh& mesh, FastOptions fopt = {},
                                   IltOptions ilt = {}) {
  std::vector<double> zero(fem.nx, 0.0);
  SubdiffusionResult out =
      solve_smooth(alpha, fem, zero, std::forward<SourceFn>(f_nodal), mesh, fopt);
  out.u[0] = u0;
  for (int n = 1; n <= mesh.steps(); ++n) {
    std::vector<double> hom = laplace_invert_E(alpha, fem, u0, mesh.t[n], ilt);
    for (int i = 0; i < fem.nx; ++i) out.u[n][i] += hom[i];
  }
  return out;
}

template <typename SourceFn>
ScalarSubdiffusionResult solve_nonsmooth_scalar(double alpha, double a, double u0,
                                                SourceFn&& f, const TimeMesh& mesh,
                                                FastOptions fopt = {}, IltOptions ilt = {}) {
  ScalarSubdiffusionResult out =
      solve_smooth_scalar(alpha, a, 0.0, std::forward<SourceFn>(f), mesh, fopt);
  out.u[0] = u0;
  for (int n = 1; n <= mesh.steps(); ++n)
    out.u[n] += laplace_invert_E(alpha, a, u0, mesh.t[n], ilt);
  return out;
}

}  // namespace gcq
