#pragma once

// Fast evaluation of the convolution quadrature sum on arbitrary meshes.
//
// The running sum c_n = sum_{j<=n} w_{n,j} f_j is split at each step into
//
//   c_n = I_n^his + I_n^loc,
//       I_n^his = sum_{j <= n-n0} w_{n,j} f_j,
//       I_n^loc = sum_{j > n-n0} w_{n,j} f_j,
//
// for a short window length n0.  The history part is pushed through the
// Stieltjes representation of the kernel: with y_n(x) satisfying the scalar
// ODE-step recursion y_n = r(tau_n x)(y_{n-1} + tau_n f_n), r(x) = 1/(1+x),
//
//   I_n^his = int_0^inf G(x) (prod_{j=n-n0+1}^{n} r(tau_j x)) y_{n-n0}(x) dx,
//
// and the integral is discretized ONCE per mesh by a quadrature rule that is
// valid for every step (build_history_quadrature).  Each history node then
// carries one scalar state advanced per step: O(N_Q^his) work and storage
// independent of n, the "oblivious" property.
//
// The local part spans at most n0 terms and is evaluated per step either by
// exact divided-difference weights on the window submesh (default; extended
// precision removes conditioning concerns) or by trapezoid quadrature on a
// complex contour around the window poles 1/tau_j (build_local_contour):
// a plain circle when the window is near-uniform, a Jacobi-elliptic
// parametrization of the same circle otherwise, which clusters nodes where
// the pole spread demands it.
//
// Contour weight convention: sum_l w_l F(z_l) ~ (1/2пi) oint_cw F(z) dz over
// the clockwise contour, so the window weights are
//   w_{n,j} = tau_j * Re sum_l w_l K(z_l) prod_{l'=j}^{n} (1 - tau_{l'} z_l)^{-1}.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gcq/ddouble.hpp"
#include "gcq/mesh.hpp"
#include "gcq/reference.hpp"
#include "gcq/special_functions.hpp"

namespace gcq {

// ---------------------------------------------------------------------------
// History quadrature
// ---------------------------------------------------------------------------

struct RealQuadrature {
  std::vector<double> x;  // nodes, strictly increasing
  std::vector<double> w;  // weights, G(x_l) and panel weights absorbed
  int n0 = 0;
  double tol = 0.0;
  double delta_min = 0.0;    // min over n > n0 of t_n - t_{n-n0}
  double moment_error = 0.0; // achieved relative error of the decay test
  std::uint64_t mesh_fingerprint = 0;

  int count() const { return static_cast<int>(x.size()); }
};

namespace fast_detail {

inline std::uint64_t fingerprint(const TimeMesh& mesh) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  for (int j = 1; j <= mesh.steps(); ++j) mix(mesh.tau[j]);
  mix(mesh.horizon());
  return h;
}

}  // namespace fast_detail

// One quadrature rule for the history integral, valid for every step of the
// given mesh.  Composite layout on (0, x_max]:
//   - Gauss-Jacobi panel with weight x^{-e} on (0, x0], x0 = 1/T, absorbing
//     the density singularity;
//   - geometric Gauss-Legendre panels [x0 2^k, x0 2^{k+1}], order selected
//     per panel by node-doubling until its contribution to the exponential
//     decay test stabilizes below tol/(#panels).
// The truncation x_max comes from bisection on the closed-form tail bound
//   int_X^inf x^{-e} (1 + delta_min x)^{-n0} dx  <=  X^{1-e-n0} delta_min^{-n0}/(n0+e-1),
// and the finished rule must reproduce the Laplace transform of the density,
//   sum_l w_l e^{-x_l t}  vs  t^{e-1}/Gamma(e),
// to a relative 20*tol at 50 log-spaced t in [delta_min, T]; the exponential
// test is stricter at t = delta_min than the rational-decay tail bound, so
// the truncation is enlarged (x4, up to three times) until it passes.
template <typename Kernel>
RealQuadrature build_history_quadrature(const Kernel& kernel, const TimeMesh& mesh, int n0,
                                        double tol) {
  if (n0 < 1) throw std::invalid_argument("build_history_quadrature: n0 >= 1 required");
  if (!(tol > 0.0)) throw std::invalid_argument("build_history_quadrature: tol > 0 required");
  const double e = kernel.density_exponent();
  if (!(e > 0.0 && e < 1.0))
    throw std::invalid_argument(
        "build_history_quadrature: density exponent must lie in (0, 1)");

  RealQuadrature rule;
  rule.n0 = n0;
  rule.tol = tol;
  rule.mesh_fingerprint = fast_detail::fingerprint(mesh);

  const int N = mesh.steps();
  if (N <= n0) return rule;  // every step is purely local: empty history rule

  double delta = std::numeric_limits<double>::infinity();
  for (int n = n0 + 1; n <= N; ++n) delta = std::min(delta, mesh.t[n] - mesh.t[n - n0]);
  rule.delta_min = delta;
  const double T = mesh.horizon();
  const double x0 = 1.0 / T;

  auto log_tail_bound = [&](double lnX) {
    return (1.0 - e - n0) * lnX - n0 * std::log(delta) - std::log(n0 + e - 1.0);
  };
  const double ln_tol = std::log(tol);
  double lnX = std::log(x0);
  if (log_tail_bound(lnX) > ln_tol) {
    double lo = lnX, hi = lnX + 5.0;
    while (log_tail_bound(hi) > ln_tol && hi < 600.0) hi += 5.0;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      (log_tail_bound(mid) > ln_tol ? lo : hi) = mid;
    }
    lnX = hi;
  }
  int k_max = std::max(0, static_cast<int>(std::ceil((lnX - std::log(x0)) / std::numbers::ln2)));

  // decay-test grid: 50 log-spaced times and the exact Laplace values
  const int n_t = 50;
  std::vector<double> ts(n_t), oracle(n_t);
  for (int i = 0; i < n_t; ++i) {
    ts[i] = delta * std::pow(T / delta, static_cast<double>(i) / (n_t - 1));
    oracle[i] = std::pow(ts[i], e - 1.0) / gamma_fn(e);
  }

  auto contribution = [&](const std::vector<double>& xs, const std::vector<double>& ws,
                          std::vector<double>& out) {
    out.assign(n_t, 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (int k = 0; k < n_t; ++k) out[k] += ws[i] * std::exp(-xs[i] * ts[k]);
  };

  double achieved = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt <= 3; ++attempt) {
    const int n_panels = k_max + 1;
    const double thr = tol / n_panels;
    std::vector<double> xs, ws;

    // candidate rule for one panel at a given order
    auto head_rule = [&](int p, std::vector<double>& px, std::vector<double>& pw) {
      GaussRule gj = gauss_jacobi_left(p, e);
      const double scale = std::pow(x0, 1.0 - e);
      px.resize(gj.nodes.size());
      pw.resize(gj.nodes.size());
      for (std::size_t i = 0; i < gj.nodes.size(); ++i) {
        double x = x0 * gj.nodes[i];
        px[i] = x;
        pw[i] = scale * gj.weights[i] * std::pow(x, e) * kernel.density(x);
      }
    };
    auto leg_rule = [&](double a, double b, int p, std::vector<double>& px,
                        std::vector<double>& pw) {
      GaussRule gl = gauss_legendre(p);
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      px.resize(gl.nodes.size());
      pw.resize(gl.nodes.size());
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        double x = mid + half * gl.nodes[i];
        px[i] = x;
        pw[i] = half * gl.weights[i] * kernel.density(x);
      }
    };
    auto add_stable = [&](auto&& make, int p_start) {
      std::vector<double> px, pw, qx, qw, cp, cq;
      make(p_start, px, pw);
      contribution(px, pw, cp);
      for (int p = 2 * p_start; p <= 128; p *= 2) {
        make(p, qx, qw);
        contribution(qx, qw, cq);
        double dev = 0.0;
        for (int k = 0; k < n_t; ++k) dev = std::max(dev, std::abs(cp[k] - cq[k]) / oracle[k]);
        if (dev < thr) break;
        px.swap(qx);
        pw.swap(qw);
        cp.swap(cq);
      }
      xs.insert(xs.end(), px.begin(), px.end());
      ws.insert(ws.end(), pw.begin(), pw.end());
    };

    add_stable([&](int p, auto& px, auto& pw) { head_rule(p, px, pw); }, 8);
    for (int k = 0; k < k_max; ++k) {
      const double a = x0 * std::ldexp(1.0, k), b = x0 * std::ldexp(1.0, k + 1);
      add_stable([&](int p, auto& px, auto& pw) { leg_rule(a, b, p, px, pw); }, 4);
    }

    std::vector<double> total;
    contribution(xs, ws, total);
    achieved = 0.0;
    for (int k = 0; k < n_t; ++k)
      achieved = std::max(achieved, std::abs(total[k] - oracle[k]) / oracle[k]);
    if (achieved < 20.0 * tol) {
      for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]))
          throw std::logic_error("build_history_quadrature: nodes not increasing");
      rule.x = std::move(xs);
      rule.w = std::move(ws);
      rule.moment_error = achieved;
      return rule;
    }
    k_max += 2;  // quadruple the truncation point and rebuild
  }
  char msg[160];
  std::snprintf(msg, sizeof(msg),
                "build_history_quadrature: decay test not satisfied: achieved relative "
                "error %.3e vs target %.3e",
                achieved, 20.0 * tol);
  throw std::runtime_error(msg);
}

// ---------------------------------------------------------------------------
// Local contour
// ---------------------------------------------------------------------------

struct ContourQuadrature {
  std::vector<std::complex<double>> z;  // nodes, Re z > 0
  std::vector<std::complex<double>> w;  // weights including the 1/(2 pi i)
  bool elliptic = false;
  double m = 0.0, M = 0.0, q = 1.0;  // window pole extremes and their ratio
  double lambda = 0.0;               // elliptic modulus (0 on the circle branch)

  int count() const { return static_cast<int>(z.size()); }
};

// Quadrature on a closed contour enclosing the window poles 1/tau_j,
// j in [j0, n1], inside Re z > 0, for integrands of the form K(z) u(z) with
// K analytic off (-inf, 0] and u rational with poles in [m, M].
//
// Near-uniform windows (q < 1.1): trapezoid rule on the circle of radius M
// centered at M + m/10.
//
// Spread windows (q >= 1.1): the domain C \ ((-inf,0] u [m,M]) is mapped
// conformally from the half-period rectangle of sn(., lambda) with modulus
// lambda = (sqrt(q)-1)/(sqrt(q)+1): w = sn(sigma, lambda) takes the
// rectangle [-2K, 2K] x (0, K') to the w-plane cut along [-1, 1] and
// {real |w| >= 1/lambda}, and the Moebius map z = sqrt(mM)(1+lambda w)/
// (1-lambda w) sends those two cuts to [m, M] and (-inf, 0].  The modulus is
// the Groetzsch-type match K(lambda')/K(lambda) = (2/pi) log(rho) with rho
// the conformal annulus ratio of the pole-cut domain.  Trapezoid nodes on
// the rectangle midline Im sigma = K'/2 then sit on the circle halfway (in
// conformal distance) between the poles and the branch cut, giving error
// O(e^{-pi K' N_Q / (4K)}), below 1e-13 for all q.
//
// The returned weights satisfy sum_l w_l F(z_l) ~ (1/2 pi i) oint_cw F dz,
// checked (and the traversal direction fixed) against the exact integral of
// 1/(x - z), x inside.
inline ContourQuadrature build_local_contour(const TimeMesh& mesh, int j0, int n1, int NQ) {
  if (j0 < 1 || n1 > mesh.steps() || j0 > n1)
    throw std::invalid_argument("build_local_contour: bad window");
  if (NQ < 2) throw std::invalid_argument("build_local_contour: at least two nodes");

  ContourQuadrature C;
  double pm = 1.0 / mesh.tau[j0], pM = pm;
  for (int j = j0 + 1; j <= n1; ++j) {
    double p = 1.0 / mesh.tau[j];
    pm = std::min(pm, p);
    pM = std::max(pM, p);
  }
  C.m = pm;
  C.M = pM;
  C.q = pM / pm;
  C.z.resize(NQ);
  C.w.resize(NQ);

  const std::complex<double> i1(0.0, 1.0);
  if (C.q < 1.1) {
    C.elliptic = false;
    const double center = pM + pm / 10.0;
    for (int l = 1; l <= NQ; ++l) {
      double theta = -std::numbers::pi + 2.0 * std::numbers::pi * l / NQ;
      std::complex<double> eit = std::exp(i1 * theta);
      C.z[l - 1] = center + pM * eit;
      C.w[l - 1] = -(i1 * pM * eit) / (i1 * static_cast<double>(NQ));
    }
  } else {
    C.elliptic = true;
    const double rq = std::sqrt(C.q);
    const double lambda = (rq - 1.0) / (rq + 1.0);
    C.lambda = lambda;
    const double K = complete_elliptic_K(lambda);
    const double Kp = complete_elliptic_K(std::sqrt((1.0 - lambda) * (1.0 + lambda)));
    const double c0 = std::sqrt(pm * pM);
    for (int l = 1; l <= NQ; ++l) {
      double sx = -2.0 * K + 4.0 * K * l / NQ;
      JacobiEllipticC J = jacobi_sncndn(std::complex<double>(sx, 0.5 * Kp), lambda);
      std::complex<double> den = 1.0 - lambda * J.sn;
      C.z[l - 1] = c0 * (1.0 + lambda * J.sn) / den;
      std::complex<double> gp = c0 * 2.0 * lambda * J.cn * J.dn / (den * den);
      C.w[l - 1] = 4.0 * K / (2.0 * std::numbers::pi * i1 * static_cast<double>(NQ)) * gp;
    }
  }

  // orientation checksum: sum w_l/(x - z_l) must be +1 for x inside
  const double xin = std::sqrt(pm * pM);
  std::complex<double> S = 0.0;
  for (int l = 0; l < NQ; ++l) S += C.w[l] / (xin - C.z[l]);
  if (std::abs(S - 1.0) <= 1e-6) {
    // clockwise as intended
  } else if (std::abs(S + 1.0) <= 1e-6) {
    for (auto& w : C.w) w = -w;
  } else {
    char msg[128];
    std::snprintf(msg, sizeof(msg),
                  "build_local_contour: orientation checksum %.3e%+.3ei (expected +-1)",
                  S.real(), S.imag());
    throw std::runtime_error(msg);
  }
  return C;
}

// ---------------------------------------------------------------------------
// Stepping state
// ---------------------------------------------------------------------------

enum class LocalMethod { exact_dd, contour };

struct FastOptions {
  int n0 = -1;      // history window; default min(10, N)
  int NQ_loc = -1;  // contour node count; default max(50, n0^2)
  double tol = 1e-8;
  LocalMethod local = LocalMethod::exact_dd;
};

namespace fast_detail {

inline double make_zero(const double&) { return 0.0; }
inline std::vector<double> make_zero(const std::vector<double>& proto) {
  return std::vector<double>(proto.size(), 0.0);
}

inline void set_zero(double& v) { v = 0.0; }
inline void set_zero(std::vector<double>& v) { std::fill(v.begin(), v.end(), 0.0); }

// y <- a*(y + b*g)
inline void advance(double a, double b, double& y, const double& g) { y = a * (y + b * g); }
inline void advance(double a, double b, std::vector<double>& y, const std::vector<double>& g) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a * (y[i] + b * g[i]);
}

// compensated acc += a*v, componentwise
inline void kahan_axpy(double a, const double& v, double& sum, double& comp) {
  double term = a * v;
  double y = term - comp;
  double t = sum + y;
  comp = (t - sum) - y;
  sum = t;
}
inline void kahan_axpy(double a, const std::vector<double>& v, std::vector<double>& sum,
                       std::vector<double>& comp) {
  for (std::size_t i = 0; i < v.size(); ++i) kahan_axpy(a, v[i], sum[i], comp[i]);
}

template <typename V>
struct complex_of;
template <>
struct complex_of<double> {
  using type = std::complex<double>;
};
template <>
struct complex_of<std::vector<double>> {
  using type = std::vector<std::complex<double>>;
};

inline std::complex<double> make_czero(const double&) { return {0.0, 0.0}; }
inline std::vector<std::complex<double>> make_czero(const std::vector<double>& proto) {
  return std::vector<std::complex<double>>(proto.size());
}
inline void set_zero(std::complex<double>& v) { v = 0.0; }
inline void set_zero(std::vector<std::complex<double>>& v) {
  std::fill(v.begin(), v.end(), std::complex<double>(0.0));
}

// u <- (u + tau*g) / (1 - tau*z)
inline void resolvent_step(std::complex<double>& u, double tau, const double& g,
                           std::complex<double> z) {
  u = (u + tau * g) / (1.0 - tau * z);
}
inline void resolvent_step(std::vector<std::complex<double>>& u, double tau,
                           const std::vector<double>& g, std::complex<double> z) {
  std::complex<double> d = 1.0 / (1.0 - tau * z);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = (u[i] + tau * g[i]) * d;
}

// compensated acc += Re(c*u), componentwise
inline void kahan_caxpy_re(std::complex<double> c, const std::complex<double>& u, double& sum,
                           double& comp) {
  kahan_axpy(1.0, (c * u).real(), sum, comp);
}
inline void kahan_caxpy_re(std::complex<double> c, const std::vector<std::complex<double>>& u,
                           std::vector<double>& sum, std::vector<double>& comp) {
  for (std::size_t i = 0; i < u.size(); ++i) kahan_caxpy_re(c, u[i], sum[i], comp[i]);
}

template <typename Kernel>
concept kernel_with_ddouble_eval = requires(const Kernel& k, ddouble x) {
  { k.eval(x) } -> std::same_as<ddouble>;
};

}  // namespace fast_detail

// Streaming evaluator for sum_{j<=n} w_{n,j} g_j with Value-typed samples
// (double or std::vector<double>) and a scalar kernel.  Two-phase protocol
// per step, in strict order n = 1, 2, ...:
//
//   partial(n)   = sum_{j<n} w_{n,j} g_j   (history + off-diagonal local)
//   diagonal(n)  = w_{n,n} = K(1/tau_n)
//   commit(n, g) registers the sample g_n and advances the states
//
// so implicit schemes can solve for g_n between partial and commit.  Live
// state: one scalar per history node, the contour workspace, and the last
// n0 samples in a ring buffer; total independent of n and N.
template <typename Kernel, typename Value = double>
class GcqConvolution {
 public:
  GcqConvolution(const Kernel& kernel, const TimeMesh& mesh, FastOptions opt = {},
                 const Value& proto = Value{})
      : kernel_(&kernel), mesh_(&mesh), opt_(opt) {
    const int N = mesh.steps();
    if (N < 1) throw std::invalid_argument("GcqConvolution: empty mesh");
    if (opt_.n0 <= 0) opt_.n0 = std::min(10, N);
    if (opt_.NQ_loc <= 0) opt_.NQ_loc = std::max(50, opt_.n0 * opt_.n0);
    history_ = build_history_quadrature(kernel, mesh, opt_.n0, opt_.tol);
    y_.assign(history_.count(), fast_detail::make_zero(proto));
    ring_.assign(opt_.n0, fast_detail::make_zero(proto));
    if (opt_.local == LocalMethod::contour)
      u_.assign(opt_.NQ_loc, fast_detail::make_czero(proto));
    zero_ = fast_detail::make_zero(proto);
  }

  int n0() const { return opt_.n0; }
  int NQ_loc() const { return opt_.NQ_loc; }
  const RealQuadrature& history() const { return history_; }

  // live per-component scalars: history states + contour states + sample ring
  int state_scalar_count() const {
    return history_.count() +
           (opt_.local == LocalMethod::contour ? opt_.NQ_loc : 0) + opt_.n0;
  }

  double diagonal(int n) const {
    check_step(n);
    return kernel_->eval(1.0 / mesh_->tau[n]);
  }

  // sum over j < n; valid before commit(n), repeatable
  Value partial(int n) {
    check_step(n);
    Value sum = zero_;
    Value comp = zero_;

    const int n0 = opt_.n0;
    const int w = std::max(1, n - n0 + 1);

    if (n > n0) {
      // bridge factors prod_{j=n-n0+1}^{n} r(tau_j x_l) applied to y_{n-n0}
      for (int l = 0; l < history_.count(); ++l) {
        const double x = history_.x[l];
        double bridge = 1.0;
        for (int j = n - n0 + 1; j <= n; ++j) bridge /= (1.0 + mesh_->tau[j] * x);
        fast_detail::kahan_axpy(history_.w[l] * bridge, y_[l], sum, comp);
      }
    }

    if (w <= n - 1) {
      if (opt_.local == LocalMethod::exact_dd) {
        local_dd_row(w, n);
        for (int j = w; j <= n - 1; ++j)
          fast_detail::kahan_axpy(row_[j - w], ring_[j % n0], sum, comp);
      } else {
        ContourQuadrature C = build_local_contour(*mesh_, w, n, opt_.NQ_loc);
        for (auto& u : u_) fast_detail::set_zero(u);
        for (int j = w; j <= n - 1; ++j)
          for (int l = 0; l < C.count(); ++l)
            fast_detail::resolvent_step(u_[l], mesh_->tau[j], ring_[j % n0], C.z[l]);
        for (int l = 0; l < C.count(); ++l) {
          std::complex<double> c =
              C.w[l] * kernel_->eval(C.z[l]) / (1.0 - mesh_->tau[n] * C.z[l]);
          fast_detail::kahan_caxpy_re(c, u_[l], sum, comp);
        }
      }
    }
    return sum;
  }

  void commit(int n, const Value& g) {
    check_step(n);
    const int n0 = opt_.n0;
    ring_[n % n0] = g;
    if (n >= n0 && history_.count() > 0) {
      const int m = n + 1 - n0;  // history states move to y_m = y_{(n+1)-n0}
      const Value& gm = ring_[m % n0];
      const double tau = mesh_->tau[m];
      for (int l = 0; l < history_.count(); ++l)
        fast_detail::advance(1.0 / (1.0 + tau * history_.x[l]), tau, y_[l], gm);
    }
    committed_ = n;
  }

 private:
  void check_step(int n) const {
    if (n != committed_ + 1)
      throw std::logic_error("GcqConvolution: steps must be processed in order");
    if (n > mesh_->steps()) throw std::logic_error("GcqConvolution: step beyond mesh");
  }

  // last-row divided-difference weights on the window submesh [w..n],
  // cached into row_[0..n-w]; extended precision when the kernel supports it
  void local_dd_row(int w, int n) {
    const int L = n - w + 1;
    TimeMesh sub;
    sub.t.assign(L + 1, 0.0);
    sub.tau.assign(L + 1, 0.0);
    for (int i = 1; i <= L; ++i) {
      sub.tau[i] = mesh_->tau[w + i - 1];
      sub.t[i] = sub.t[i - 1] + sub.tau[i];
    }
    row_.resize(L);
    if constexpr (fast_detail::kernel_with_ddouble_eval<Kernel>) {
      auto W = weights_dd<ddouble>(*kernel_, sub);
      for (int i = 1; i <= L; ++i) row_[i - 1] = to_double(W(L, i));
    } else {
      auto W = weights_dd(*kernel_, sub);
      for (int i = 1; i <= L; ++i) row_[i - 1] = W(L, i);
    }
  }

  const Kernel* kernel_;
  const TimeMesh* mesh_;
  FastOptions opt_;
  RealQuadrature history_;
  std::vector<Value> y_;     // history states y_m(x_l), lagged n0 behind
  std::vector<Value> ring_;  // samples g_j for the local window
  std::vector<typename fast_detail::complex_of<Value>::type> u_;  // contour workspace
  std::vector<double> row_;  // local dd weight row workspace
  Value zero_;
  int committed_ = 0;
};

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

struct FastDiagnostics {
  int NQ_his = 0;
  int NQ_loc = 0;
  int n0 = 0;
  double wall_seconds = 0.0;
  double moment_error = 0.0;
};

// c_n = sum_{j<=n} w_{n,j} f(t_j) for n = 0..N (c_0 = 0), f sampled at the
// mesh points only (t = 0 is never touched, so f may be singular there).
template <typename Kernel, typename F>
std::vector<double> fractional_integral(const Kernel& kernel, const TimeMesh& mesh, F&& f,
                                        FastOptions opt = {},
                                        FastDiagnostics* diag = nullptr) {
  const auto t_start = std::chrono::steady_clock::now();
  const int N = mesh.steps();
  GcqConvolution<Kernel, double> conv(kernel, mesh, opt);
  std::vector<double> c(N + 1, 0.0);
  for (int n = 1; n <= N; ++n) {
    const double fn = f(mesh.t[n]);
    c[n] = conv.partial(n) + conv.diagonal(n) * fn;
    conv.commit(n, fn);
  }
  if (diag) {
    diag->NQ_his = conv.history().count();
    diag->NQ_loc = conv.NQ_loc();
    diag->n0 = conv.n0();
    diag->moment_error = conv.history().moment_error;
    diag->wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  }
  return c;
}

// same driver for precomputed samples f[0..N]; f[0] is ignored
template <typename Kernel>
std::vector<double> fractional_integral_samples(const Kernel& kernel, const TimeMesh& mesh,
                                                const std::vector<double>& samples,
                                                FastOptions opt = {},
                                                FastDiagnostics* diag = nullptr) {
  if (static_cast<int>(samples.size()) != mesh.steps() + 1)
    throw std::invalid_argument("fractional_integral_samples: need N+1 samples");
  int n = 0;
  return fractional_integral(
      kernel, mesh, [&](double) { return samples[++n]; }, opt, diag);
}

}  // namespace gcq
