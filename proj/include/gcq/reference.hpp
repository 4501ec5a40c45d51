#pragma once

// Direct O(N^2) convolution weights on an arbitrary time mesh.
//
// The scheme approximates (K(d/dt) f)(t_n) by sum_{j=1}^{n} w_{n,j} f(t_j)
// where the weights admit two equivalent representations:
//
//   quadrature form   w_{n,j} = tau_j int_0^inf G(x) prod_{l=j}^{n}
//                               (1 + tau_l x)^{-1} dx
//   difference form   w_{n,j} = prod_{l=j+1}^{n} (-tau_l)^{-1}
//                               * K[1/tau_j, ..., 1/tau_n]
//
// with K[...] a divided difference of the kernel over reciprocal steps.
// weights_dd fills the whole lower-triangular table with a rescaled
// recurrence that works directly on the weights,
//
//   w_{n,n} = K(x_n),
//   w_{n,j} = (x_n w_{n-1,j} - x_{j+1} w_{n,j+1}) / (x_n - x_j),  x_i = 1/tau_i,
//
// so no intermediate quantity ever over- or underflows.  Coincident steps
// make the denominator vanish: on a fully uniform mesh the confluent limit
// is used exactly (kernels that provide it), otherwise tied reciprocal steps
// are separated by one-ulp perturbations, which is accurate for isolated
// ties but degrades for long runs of equal steps when the kernel has no
// confluent form.
//
// weights_real_quadrature evaluates the quadrature form numerically.  The
// integrand has an x^{-e} singularity at the origin and poles of the rational
// factor at x = -1/tau_l, so the axis is split at the reciprocal extreme
// steps: a Gauss-Jacobi rule absorbs the singularity on (0, 1/tau_max],
// adaptive Gauss-Kronrod covers [1/tau_max, 1/tau_min] and the tail in
// geometrically growing panels, and the tail is truncated once a decreasing
// majorant of the (log-space) integrand falls below the requested absolute
// accuracy.  Orders of magnitude slower than weights_dd; exists as an
// independent cross-check of the tables.

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gcq/ddouble.hpp"
#include "gcq/kernels.hpp"
#include "gcq/mesh.hpp"
#include "gcq/special_functions.hpp"

namespace gcq {

// Lower-triangular table of convolution weights, rows n = 1..N, entries
// j = 1..n.
template <typename V>
struct WeightTable {
  int N = 0;
  std::vector<V> w;

  explicit WeightTable(int N_) : N(N_), w(static_cast<std::size_t>(N_) * (N_ + 1) / 2) {}

  static std::size_t index(int n, int j) {
    return static_cast<std::size_t>(n - 1) * n / 2 + (j - 1);
  }
  V& operator()(int n, int j) { return w[index(n, j)]; }
  const V& operator()(int n, int j) const { return w[index(n, j)]; }
};

template <typename Kernel, typename Real>
concept kernel_with_confluent_limit = requires(const Kernel& k, Real x) {
  { k.confluent_weight(x, 1) };
};

struct DdOptions {
  bool perturb_ties = true;  // separate exactly tied reciprocal steps
};

// Plain Newton divided difference K[x_1, ..., x_k] by the triangular
// recursion.  Coincident nodes carry no derivative data here, so they are
// separated by one-ulp relative perturbations; *perturbed reports whether
// that happened.
template <typename F>
double divided_differences(F&& K, std::vector<double> nodes, bool* perturbed = nullptr) {
  if (nodes.empty()) throw std::invalid_argument("divided_differences: no nodes");
  for (double x : nodes)
    if (!(x > 0.0)) throw std::invalid_argument("divided_differences: nodes must be positive");
  if (perturbed) *perturbed = false;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    bool tied = true;
    while (tied) {
      tied = false;
      for (std::size_t k = 0; k < i; ++k)
        if (nodes[k] == nodes[i]) {
          nodes[i] *= 1.0 + std::numeric_limits<double>::epsilon();
          tied = true;
          if (perturbed) *perturbed = true;
          break;
        }
    }
  }
  std::vector<double> d(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) d[i] = K(nodes[i]);
  for (std::size_t level = 1; level < nodes.size(); ++level)
    for (std::size_t i = nodes.size() - 1; i >= level; --i)
      d[i] = (d[i] - d[i - 1]) / (nodes[i] - nodes[i - level]);
  return d.back();
}

// Full weight table by the rescaled divided-difference recurrence.  Real
// selects the working precision of the recurrence (double or ddouble) for
// scalar kernels; matrix-valued kernels use Real = double.
template <typename Real = double, typename Kernel>
auto weights_dd(const Kernel& kernel, const TimeMesh& mesh, DdOptions opt = {}) {
  using V = decltype(kernel.eval(std::declval<Real>()));
  const int N = mesh.steps();
  WeightTable<V> table(N);
  if (N == 0) return table;

  std::vector<Real> x(N + 1, Real(0.0));
  for (int i = 1; i <= N; ++i) x[i] = Real(1.0) / Real(mesh.tau[i]);

  bool all_equal = true;
  for (int i = 2; i <= N; ++i) all_equal = all_equal && (mesh.tau[i] == mesh.tau[1]);

  if (all_equal) {
    if constexpr (kernel_with_confluent_limit<Kernel, Real>) {
      std::vector<V> by_lag(N);
      for (int m = 0; m < N; ++m) by_lag[m] = kernel.confluent_weight(x[1], m);
      for (int n = 1; n <= N; ++n)
        for (int j = 1; j <= n; ++j) table(n, j) = by_lag[n - j];
      return table;
    }
  }

  if (opt.perturb_ties) {
    for (int i = 2; i <= N; ++i) {
      bool tied = true;
      while (tied) {
        tied = false;
        for (int k = 1; k < i; ++k)
          if (x[k] == x[i]) {
            x[i] = x[i] * Real(1.0 + std::numeric_limits<double>::epsilon());
            tied = true;
            break;
          }
      }
    }
  }

  table(1, 1) = kernel.eval(x[1]);
  for (int n = 2; n <= N; ++n) {
    table(n, n) = kernel.eval(x[n]);
    for (int j = n - 1; j >= 1; --j) {
      Real den = x[n] - x[j];
      if (den == Real(0.0))
        throw std::runtime_error("weights_dd: coincident reciprocal steps; "
                                 "enable tie perturbation or refine the mesh");
      table(n, j) = (x[n] * table(n - 1, j) - x[j + 1] * table(n, j + 1)) / den;
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Quadrature-form weights (reference implementation)
// ---------------------------------------------------------------------------

namespace ref_detail {

// int_0^inf G(x) prod_{l=j}^{n} (1 + tau_l x)^{-1} dx for one (n, j).
//
// Layout: Gauss-Jacobi head on (0, x_lo] with x_lo = 1/tau_max (plain
// Gauss-Legendre when G is regular at the origin), adaptive Gauss-Kronrod
// on geometric panels across [x_lo, x_hi] with x_hi = 1/tau_min, then
// geometric tail panels truncated once x * G(x) * prod r, which decreases
// on the tail, drops below the absolute target.  The nearest pole of the
// rational factor sits at x = -1/tau_max, one head-length to the left of
// the origin, so every panel sees an analytic integrand.
template <typename Kernel>
double quadrature_entry(const Kernel& kernel, const TimeMesh& mesh, int n, int j,
                        const GaussRule& head, double e, double x_lo, double x_hi,
                        double tol) {
  auto prod_r = [&](double x) {
    double p = 1.0;
    for (int l = j; l <= n; ++l) p /= (1.0 + mesh.tau[l] * x);
    return p;
  };
  auto integrand = [&](double x) { return kernel.density(x) * prod_r(x); };

  double total = 0.0;
  const bool singular_head = (e > 0.0 && e < 1.0);
  const double head_scale = singular_head ? std::pow(x_lo, 1.0 - e) : x_lo;
  for (std::size_t i = 0; i < head.nodes.size(); ++i) {
    double x = x_lo * head.nodes[i];
    double g = singular_head ? std::pow(x, e) * kernel.density(x) : kernel.density(x);
    total += head_scale * head.weights[i] * g * prod_r(x);
  }

  using boost::math::quadrature::gauss_kronrod;
  auto panel = [&](double a, double b) {
    return gauss_kronrod<double, 31>::integrate(integrand, a, b, 12, 1e-14);
  };

  double a = x_lo;
  while (a < x_hi * (1.0 - 1e-14)) {
    double b = std::min(2.0 * a, x_hi);
    total += panel(a, b);
    a = b;
  }

  for (int p = 0;; ++p) {
    if (a * integrand(a) < 0.25 * tol) return total;
    if (p >= 400) {
      char msg[160];
      std::snprintf(msg, sizeof(msg),
                    "weights_real_quadrature: tail not converged for entry (%d,%d): "
                    "majorant %.3e at x=%.3e vs tol %.3e",
                    n, j, a * integrand(a), a, tol);
      throw std::runtime_error(msg);
    }
    total += panel(a, 2.0 * a);
    a *= 2.0;
  }
}

}  // namespace ref_detail

template <typename Kernel>
WeightTable<double> weights_real_quadrature(const Kernel& kernel, const TimeMesh& mesh,
                                            double tol = 1e-13) {
  const int N = mesh.steps();
  WeightTable<double> table(N);
  if (N == 0) return table;

  double tau_max = mesh.tau[1], tau_min = mesh.tau[1];
  for (int i = 2; i <= N; ++i) {
    tau_max = std::max(tau_max, mesh.tau[i]);
    tau_min = std::min(tau_min, mesh.tau[i]);
  }
  const double x_lo = 1.0 / tau_max, x_hi = 1.0 / tau_min;
  const double e = kernel.density_exponent();
  GaussRule head = (e > 0.0 && e < 1.0) ? gauss_jacobi_left(48, e) : gauss_legendre_01(48);

  for (int n = 1; n <= N; ++n)
    for (int j = 1; j <= n; ++j)
      table(n, j) = mesh.tau[j] * ref_detail::quadrature_entry(kernel, mesh, n, j, head, e,
                                                               x_lo, x_hi, tol);
  return table;
}

// ---------------------------------------------------------------------------
// Direct application
// ---------------------------------------------------------------------------

// c_n = sum_{j=1}^{n} w_{n,j} f[j] for n = 0..N (c_0 = 0), f indexed by node.
// Compensated summation in ascending j keeps the result independent of any
// platform reassociation.
inline std::vector<double> apply_direct(const WeightTable<double>& table,
                                        const std::vector<double>& f) {
  if (static_cast<int>(f.size()) != table.N + 1)
    throw std::invalid_argument("apply_direct: sample vector must have N+1 entries");
  std::vector<double> c(table.N + 1, 0.0);
  for (int n = 1; n <= table.N; ++n) {
    double sum = 0.0, comp = 0.0;
    for (int j = 1; j <= n; ++j) {
      double term = table(n, j) * f[j];
      double y = term - comp;
      double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
    c[n] = sum;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Composition check
// ---------------------------------------------------------------------------

namespace ref_detail {

// Symbol z^alpha with alpha in (0, 1): the discrete fractional derivative
// taken in one shot.  Only used to validate the composition rule; unlike
// PowerKernel it carries no Stieltjes density.
struct DerivativeSymbol {
  double alpha;
  template <typename Real>
  Real eval(const Real& z) const {
    if constexpr (std::is_same_v<Real, ddouble>) {
      return dd_pow(z, ddouble(alpha));
    } else {
      return std::pow(z, alpha);
    }
  }
  template <typename Real>
  Real confluent_weight(const Real& x, int m) const {
    Real c = eval(x);
    for (int i = 0; i < m; ++i) c = c * ((static_cast<double>(i) - alpha) / (i + 1.0));
    return c;
  }
};

inline WeightTable<double> round_table(const WeightTable<ddouble>& src) {
  WeightTable<double> dst(src.N);
  for (std::size_t i = 0; i < src.w.size(); ++i) dst.w[i] = to_double(src.w[i]);
  return dst;
}

}  // namespace ref_detail

// The weights satisfy a discrete composition rule: applying the history
// weights of z^{alpha-1} to the backward difference (f_n - f_{n-1})/tau_n
// equals applying the weights of z^alpha to f directly, because both sides
// are the same rational function of the backward-difference operator.
// Returns the largest deviation between the two over a fixed bundle of
// pseudo-random sample vectors (f_0 = 0).  The backward difference divides
// by the smallest steps, which amplifies construction noise in the tables,
// so both tables are built in extended precision and rounded; the residual
// then measures the algebraic identity, not table conditioning.
inline double composition_residual(double alpha, const TimeMesh& mesh, int n_samples = 5) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("composition_residual: alpha must lie in (0, 1)");
  const int N = mesh.steps();
  const auto W_hist =
      ref_detail::round_table(weights_dd<ddouble>(frac_derivative_history_kernel(alpha), mesh));
  const auto W_der =
      ref_detail::round_table(weights_dd<ddouble>(ref_detail::DerivativeSymbol{alpha}, mesh));

  std::mt19937 rng(12345u);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double residual = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    std::vector<double> f(N + 1, 0.0), g(N + 1, 0.0);
    for (int n = 1; n <= N; ++n) f[n] = U(rng);
    for (int n = 1; n <= N; ++n) g[n] = (f[n] - f[n - 1]) / mesh.tau[n];
    const auto lhs = apply_direct(W_hist, g);
    const auto rhs = apply_direct(W_der, f);
    for (int n = 1; n <= N; ++n) residual = std::max(residual, std::abs(lhs[n] - rhs[n]));
  }
  return residual;
}

}  // namespace gcq
