#pragma once

// Scalar special functions and Gauss quadrature rules used across the
// library: Gamma (Lanczos), two-parameter Mittag-Leffler, complete elliptic
// integral K (AGM), Jacobi elliptic sn/cn/dn for real and complex arguments,
// Gauss-Legendre and left-singular Gauss-Jacobi rules via Golub-Welsch.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gcq/ddouble.hpp"

namespace gcq {

// ---------------------------------------------------------------------------
// Gamma
// ---------------------------------------------------------------------------

// Lanczos approximation, g = 7, 9 terms: ~15 significant digits on the
// positive axis, reflection formula for negative non-integer arguments.
inline double gamma_fn(double x) {
  static const double g = 7.0;
  static const double c[9] = {
      0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,    12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6,  1.5056327351493116e-7};

  if (std::isnan(x)) throw std::domain_error("gamma_fn: nan argument");
  if (x <= 0.0 && x == std::floor(x))
    throw std::domain_error("gamma_fn: pole at non-positive integer");

  if (x < 0.5) {
    // Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_fn(1.0 - x));
  }
  double z = x - 1.0;
  double a = c[0];
  for (int i = 1; i < 9; ++i) a += c[i] / (z + i);
  double t = z + g + 0.5;
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

// ---------------------------------------------------------------------------
// Mittag-Leffler E_{a,b}(z), real z
// ---------------------------------------------------------------------------

namespace sf_detail {

// E_{1,b}(z) = e^z * gammastar(b-1, z) with
// gammastar(s, z) = sum_k (-z)^k / (k! Gamma(s) (s+k)).
// For z < 0 every term with k >= 1 has the same sign, so the sum is
// cancellation-free and the exact factor e^z keeps absolute accuracy at
// machine level however large |z| is.
inline double ml_a_equal_one(double b, double z) {
  double s = b - 1.0;
  if (s <= 0.0 && s == std::floor(s)) {
    // E_{1,1-n}(z) = z^n e^z
    return std::pow(z, -s) * std::exp(z);
  }
  double inv_gamma_s = 1.0 / gamma_fn(s);
  double sum = 0.0, comp = 0.0;
  double pk = 1.0;  // (-z)^k / k!
  for (int k = 0; k < 4000; ++k) {
    double term = pk / (s + k) * inv_gamma_s;
    double yk = term - comp;
    double tk = sum + yk;
    comp = (tk - sum) - yk;
    sum = tk;
    pk *= -z / (k + 1);
    if (k > 4 && std::abs(term) < 1e-18 * (1.0 + std::abs(sum)) && std::abs(pk) < std::abs(term))
      return std::exp(z) * sum;
  }
  return std::exp(z) * sum;
}

}  // namespace sf_detail

// Series evaluation, double-double internally so that the alternating sums
// for negative arguments keep ~1e-13 absolute accuracy as long as the peak
// term stays below ~1e18 (every use in this library is far inside that).
inline double mittag_leffler(double a, double b, double z) {
  if (!(a > 0.0)) throw std::invalid_argument("mittag_leffler: requires a > 0");
  if (std::abs(z) > 50.0)
    throw std::invalid_argument("mittag_leffler: series restricted to |z| <= 50");
  if (z == 0.0) return 1.0 / gamma_fn(b);
  if (a == 1.0) return sf_detail::ml_a_equal_one(b, z);

  const ddouble lz = dd_log(ddouble(std::abs(z)));
  const bool neg = z < 0.0;
  ddouble sum(0.0);
  double peak = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  int tail_decay = 0;
  bool converged = false;
  for (int l = 0; l < 3000; ++l) {
    double arg = a * l + b;
    ddouble term;
    if (arg > 0.0) {
      ddouble le = ddouble(static_cast<double>(l)) * lz - dd_lgamma(ddouble(arg));
      if (le.hi > 700.0) throw std::runtime_error("mittag_leffler: series term overflow");
      term = dd_exp(le);
    } else if (arg == std::floor(arg)) {
      continue;  // 1/Gamma at a non-positive integer pole is zero
    } else {
      // reflection: 1/Gamma(arg) = sin(pi*arg) Gamma(1-arg) / pi
      ddouble mag = dd_exp(ddouble(static_cast<double>(l)) * lz + dd_lgamma(ddouble(1.0 - arg)));
      term = mag * ddouble(std::sin(std::numbers::pi * arg) / std::numbers::pi);
    }
    if (neg && (l & 1)) term = -term;
    sum += term;
    double mag = std::abs(to_double(term));
    peak = std::max(peak, mag);
    if (mag < 1e-30 * (1.0 + std::abs(to_double(sum))) && mag <= prev) {
      if (++tail_decay >= 3) {
        converged = true;
        break;
      }
    } else {
      tail_decay = 0;
    }
    prev = mag;
  }
  if (!converged)
    throw std::runtime_error("mittag_leffler: series failed to converge");
  if (neg && peak > 1e18)
    throw std::runtime_error("mittag_leffler: cancellation exceeds precision envelope");
  return to_double(sum);
}

// ---------------------------------------------------------------------------
// Complete elliptic integral K(lambda), lambda = modulus k in [0, 1)
// ---------------------------------------------------------------------------

inline double complete_elliptic_K(double lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0))
    throw std::invalid_argument("complete_elliptic_K: modulus must lie in [0,1)");
  double a = 1.0;
  double bb = std::sqrt((1.0 - lambda) * (1.0 + lambda));
  // quadratic convergence; the cap guards against 1-ulp oscillation of the pair
  for (int it = 0; it < 40 && std::abs(a - bb) > 4.0e-16 * a; ++it) {
    double an = 0.5 * (a + bb);
    bb = std::sqrt(a * bb);
    a = an;
  }
  return std::numbers::pi / (2.0 * a);
}

// ---------------------------------------------------------------------------
// Jacobi elliptic functions, modulus convention: sn(u, lambda) with
// lambda = k (NOT the parameter m = k^2)
// ---------------------------------------------------------------------------

struct JacobiElliptic {
  double sn, cn, dn;
};

// AGM evaluation of sn, cn, dn for real argument (descending Landen chain).
inline JacobiElliptic jacobi_sncndn(double u, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("jacobi_sncndn: modulus must lie in [0,1]");
  double m = lambda * lambda;
  if (m < 1e-30) return {std::sin(u), std::cos(u), 1.0};
  if (1.0 - m < 1e-30) {
    double s = std::tanh(u);
    double c = 1.0 / std::cosh(u);
    return {s, c, c};
  }

  const double tol = 1e-9;  // AGM is quadratic: one step past tol reaches eps
  double emc = 1.0 - m;
  double a = 1.0, dn = 1.0;
  double em[16], en[16];
  int l = 0;
  for (int i = 0; i < 14; ++i) {
    l = i;
    em[i] = a;
    emc = std::sqrt(emc);
    en[i] = emc;
    double c = 0.5 * (a + emc);
    if (std::abs(a - emc) <= tol * a) break;
    emc *= a;
    a = c;
  }
  double phase = 0.5 * (a + en[l]) * u;
  double sn = std::sin(phase);
  double cn = std::cos(phase);
  if (sn != 0.0) {
    double aa = cn / sn;
    double c = 0.5 * (a + en[l]) * aa;
    for (int i = l; i >= 0; --i) {
      double b = em[i];
      aa = c * aa;
      c *= dn;
      dn = (en[i] + aa) / (b + aa);
      aa = c / b;
    }
    double inv = 1.0 / std::sqrt(c * c + 1.0);
    sn = (sn >= 0.0) ? inv : -inv;
    cn = c * sn;
  }
  return {sn, cn, dn};
}

inline double jacobi_sn(double u, double lambda) { return jacobi_sncndn(u, lambda).sn; }

struct JacobiEllipticC {
  std::complex<double> sn, cn, dn;
};

// Complex argument through the addition theorem: values at x with modulus
// lambda combined with values at y with the complementary modulus.
inline JacobiEllipticC jacobi_sncndn(std::complex<double> u, double lambda) {
  double x = u.real(), y = u.imag();
  JacobiElliptic R = jacobi_sncndn(x, lambda);
  double lamc = std::sqrt((1.0 - lambda) * (1.0 + lambda));
  JacobiElliptic I = jacobi_sncndn(y, lamc);
  double m = lambda * lambda;
  double den = I.cn * I.cn + m * R.sn * R.sn * I.sn * I.sn;
  std::complex<double> i1(0.0, 1.0);
  std::complex<double> sn = (R.sn * I.dn + i1 * (R.cn * R.dn * I.sn * I.cn)) / den;
  std::complex<double> cn = (R.cn * I.cn - i1 * (R.sn * R.dn * I.sn * I.dn)) / den;
  std::complex<double> dn = (R.dn * I.cn * I.dn - i1 * (m * R.sn * R.cn * I.sn)) / den;
  return {sn, cn, dn};
}

inline std::complex<double> jacobi_sn(std::complex<double> u, double lambda) {
  return jacobi_sncndn(u, lambda).sn;
}

// ---------------------------------------------------------------------------
// Gauss rules (Golub-Welsch)
// ---------------------------------------------------------------------------

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace sf_detail {

// Symmetric tridiagonal eigenvalues plus first components of the normalized
// eigenvectors (QL with implicit shifts, EISPACK imtql2 lineage).  d holds the
// diagonal, e the subdiagonal (e[0] unused slot at the end), z the first-row
// seed vector; on return d is ascending and z holds first components.
inline void tridiag_eigen_first(std::vector<double>& d, std::vector<double>& e,
                                std::vector<double>& z) {
  const int n = static_cast<int>(d.size());
  if (n == 1) return;
  const double prec = std::numeric_limits<double>::epsilon();
  e.resize(n);
  e[n - 1] = 0.0;

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    for (;;) {
      int m = l;
      for (; m < n - 1; ++m)
        if (std::abs(e[m]) <= prec * (std::abs(d[m]) + std::abs(d[m + 1]))) break;
      if (m == l) break;
      if (++iter > 40) throw std::runtime_error("tridiag_eigen_first: QL failed to converge");
      double p = d[l];
      double g = (d[l + 1] - p) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - p + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0;
      p = 0.0;
      for (int i = m - 1; i >= l; --i) {
        double f = s * e[i];
        double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        f = z[i + 1];
        z[i + 1] = s * z[i] + c * f;
        z[i] = c * z[i] - s * f;
      }
      if (r == 0.0 && m - 1 >= l) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
  // insertion sort ascending, permuting z along
  for (int i = 1; i < n; ++i) {
    double dk = d[i], zk = z[i];
    int j = i - 1;
    for (; j >= 0 && d[j] > dk; --j) {
      d[j + 1] = d[j];
      z[j + 1] = z[j];
    }
    d[j + 1] = dk;
    z[j + 1] = zk;
  }
}

inline GaussRule golub_welsch(std::vector<double> diag, std::vector<double> sub, double mu0) {
  const int n = static_cast<int>(diag.size());
  std::vector<double> z(n, 0.0);
  z[0] = 1.0;
  std::vector<double> e(n, 0.0);
  for (int i = 0; i + 1 < n; ++i) e[i] = sub[i];
  tridiag_eigen_first(diag, e, z);
  GaussRule rule;
  rule.nodes = std::move(diag);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) rule.weights[i] = mu0 * z[i] * z[i];
  return rule;
}

}  // namespace sf_detail

// n-point Gauss-Legendre on [-1, 1].
inline GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
  std::vector<double> diag(n, 0.0), sub(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) sub[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  return sf_detail::golub_welsch(std::move(diag), std::move(sub), 2.0);
}

// n-point Gauss-Legendre on [0, 1].
inline GaussRule gauss_legendre_01(int n) {
  GaussRule r = gauss_legendre(n);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    r.nodes[i] = 0.5 * (1.0 + r.nodes[i]);
    r.weights[i] *= 0.5;
  }
  return r;
}

// n-point rule for integrals int_0^1 x^{-alpha} f(x) dx with alpha in (0, 1):
// the weight function is absorbed into the weights, f is sampled plainly.
inline GaussRule gauss_jacobi_left(int n, double alpha) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi_left: n >= 1 required");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("gauss_jacobi_left: alpha must lie in (0,1)");
  // Jacobi weight (1-x)^a (1+x)^b on [-1,1] with a = 0, b = -alpha,
  // then map x -> (1+x)/2 onto [0,1].
  const double b = -alpha;
  std::vector<double> diag(n), sub(n > 1 ? n - 1 : 0);
  diag[0] = b / (b + 2.0);
  for (int k = 1; k < n; ++k)
    diag[k] = (b * b) / ((2.0 * k + b) * (2.0 * k + b + 2.0));
  if (n > 1) {
    sub[0] = std::sqrt(4.0 * (b + 1.0) / ((b + 2.0) * (b + 2.0) * (b + 3.0)));
    for (int k = 2; k < n; ++k) {
      double kk = k;
      double num = 4.0 * kk * kk * (kk + b) * (kk + b);
      double den = (2.0 * kk + b) * (2.0 * kk + b) * ((2.0 * kk + b) * (2.0 * kk + b) - 1.0);
      sub[k - 1] = std::sqrt(num / den);
    }
  }
  double mu0 = std::pow(2.0, 1.0 + b) / (1.0 + b);  // int_{-1}^{1} (1+x)^b dx
  GaussRule r = sf_detail::golub_welsch(std::move(diag), std::move(sub), mu0);
  const double scale = std::pow(0.5, 1.0 + b);  // maps weights to [0,1]
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = 0.5 * (1.0 + r.nodes[i]);
    r.weights[i] *= scale;
  }
  return r;
}

}  // namespace gcq
