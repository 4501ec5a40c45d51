#pragma once

// Sectorial convolution kernels given through their Stieltjes representation
//   K(z) = int_0^inf G(x) / (z + x) dx,
// which is the form the quadrature-based weight algorithms consume: K itself
// for divided-difference and contour weights, the density G for weights built
// from quadrature on the positive real axis.
//
// Provided kernels:
//   PowerKernel              K(z) = z^mu, mu in (-1, 0)
//     - fractional integral of order alpha:        mu = -alpha
//     - history kernel of the Caputo derivative:   mu = alpha - 1
//   ScalarResolventKernel    K(z) = 1 / (z^alpha + a)
//   MatrixResolventKernel    K(z) = (z^alpha I + A)^{-1}, A symmetric
//                            positive definite (dense)

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gcq/ddouble.hpp"

namespace gcq {

// ---------------------------------------------------------------------------
// Power kernel
// ---------------------------------------------------------------------------

struct PowerKernel {
  double mu;  // exponent in (-1, 0)

  explicit PowerKernel(double mu_) : mu(mu_) {
    if (!(mu > -1.0 && mu < 0.0))
      throw std::invalid_argument("PowerKernel: exponent must lie in (-1, 0)");
  }

  template <typename Real>
  Real eval(const Real& z) const {
    if constexpr (std::is_same_v<Real, ddouble>) {
      return dd_pow(z, ddouble(mu));
    } else {
      using std::pow;  // admits extended-precision types via ADL
      return pow(z, Real(mu));
    }
  }

  std::complex<double> eval(std::complex<double> z) const {
    return std::pow(z, std::complex<double>(mu, 0.0));  // principal branch
  }

  // G(x) = -sin(pi mu)/pi * x^mu, positive on (0, inf) for mu in (-1, 0)
  double density(double x) const {
    return -std::sin(std::numbers::pi * mu) / std::numbers::pi * std::pow(x, mu);
  }

  // G(x) ~ x^{-e} as x -> 0 with this e; in (0, 1) for power kernels
  double density_exponent() const { return -mu; }

  // Weight of a window of m+1 coincident nodes with common reciprocal step x:
  // the confluent limit of the rescaled divided difference equals
  // (-1)^m binom(mu, m) x^mu.  On a uniform mesh this reproduces the
  // classical convolution quadrature weights of the implicit Euler method.
  template <typename Real>
  Real confluent_weight(const Real& x, int m) const {
    Real c = eval(x);
    for (int i = 0; i < m; ++i) c = c * ((static_cast<double>(i) - mu) / (i + 1.0));
    return c;
  }
};

inline PowerKernel frac_integral_kernel(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("frac_integral_kernel: alpha must lie in (0, 1)");
  return PowerKernel(-alpha);
}

inline PowerKernel frac_derivative_history_kernel(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("frac_derivative_history_kernel: alpha must lie in (0, 1)");
  return PowerKernel(alpha - 1.0);
}

// ---------------------------------------------------------------------------
// Scalar resolvent kernel
// ---------------------------------------------------------------------------

struct ScalarResolventKernel {
  double alpha;  // in (0, 1)
  double a;      // positive shift

  ScalarResolventKernel(double alpha_, double a_) : alpha(alpha_), a(a_) {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::invalid_argument("ScalarResolventKernel: alpha must lie in (0, 1)");
    if (!(a > 0.0)) throw std::invalid_argument("ScalarResolventKernel: a > 0 required");
  }

  template <typename Real>
  Real eval(const Real& z) const {
    static_assert(std::is_same_v<Real, double>, "real resolvent evaluation is double only");
    return 1.0 / (std::pow(z, alpha) + a);
  }

  std::complex<double> eval(std::complex<double> z) const {
    return 1.0 / (std::pow(z, std::complex<double>(alpha, 0.0)) + a);
  }

  // Jump of K across the negative real axis:
  // G(x) = sin(pi alpha)/pi * x^alpha / |x^alpha e^{i pi alpha} + a|^2
  double density(double x) const {
    double xa = std::pow(x, alpha);
    double re = xa * std::cos(std::numbers::pi * alpha) + a;
    double im = xa * std::sin(std::numbers::pi * alpha);
    return std::sin(std::numbers::pi * alpha) / std::numbers::pi * xa / (re * re + im * im);
  }

  double density_exponent() const { return -alpha; }  // G vanishes like x^alpha
};

// ---------------------------------------------------------------------------
// Dense matrices (row-major) with LU solves; small systems only
// ---------------------------------------------------------------------------

template <typename T>
struct DenseMatrix {
  int n = 0;
  std::vector<T> a;  // row-major, n*n

  DenseMatrix() = default;
  explicit DenseMatrix(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, T{}) {}

  T& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  const T& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }

  static DenseMatrix identity(int n_) {
    DenseMatrix m(n_);
    for (int i = 0; i < n_; ++i) m(i, i) = T{1};
    return m;
  }

  DenseMatrix& operator+=(const DenseMatrix& o) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += o.a[i];
    return *this;
  }
  DenseMatrix& operator-=(const DenseMatrix& o) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= o.a[i];
    return *this;
  }
  friend DenseMatrix operator+(DenseMatrix l, const DenseMatrix& r) { return l += r; }
  friend DenseMatrix operator-(DenseMatrix l, const DenseMatrix& r) { return l -= r; }
  friend DenseMatrix operator*(double s, DenseMatrix m) {
    for (auto& v : m.a) v = s * v;
    return m;
  }
  friend DenseMatrix operator/(DenseMatrix m, double s) {
    for (auto& v : m.a) v = v / s;
    return m;
  }
  DenseMatrix operator-() const {
    DenseMatrix m = *this;
    for (auto& v : m.a) v = -v;
    return m;
  }

  std::vector<T> apply(const std::vector<T>& x) const {
    std::vector<T> y(n, T{});
    for (int i = 0; i < n; ++i) {
      T s{};
      for (int j = 0; j < n; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  DenseMatrix matmul(const DenseMatrix& o) const {
    DenseMatrix r(n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        T v = (*this)(i, k);
        for (int j = 0; j < n; ++j) r(i, j) += v * o(k, j);
      }
    return r;
  }
};

namespace lin_detail {

template <typename T>
double mag(const T& v) {
  return std::abs(v);
}

// In-place LU with partial pivoting; perm records row swaps.
template <typename T>
void lu_factor(DenseMatrix<T>& m, std::vector<int>& perm) {
  const int n = m.n;
  perm.resize(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = mag(m(k, k));
    for (int i = k + 1; i < n; ++i)
      if (mag(m(i, k)) > best) {
        best = mag(m(i, k));
        p = i;
      }
    if (best == 0.0) throw std::runtime_error("lu_factor: singular matrix");
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      std::swap(perm[k], perm[p]);
    }
    for (int i = k + 1; i < n; ++i) {
      T l = m(i, k) / m(k, k);
      m(i, k) = l;
      for (int j = k + 1; j < n; ++j) m(i, j) -= l * m(k, j);
    }
  }
}

template <typename T>
std::vector<T> lu_solve_factored(const DenseMatrix<T>& lu, const std::vector<int>& perm,
                                 const std::vector<T>& b) {
  const int n = lu.n;
  std::vector<T> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[perm[i]];
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) x[i] -= lu(i, j) * x[j];
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) x[i] -= lu(i, j) * x[j];
    x[i] = x[i] / lu(i, i);
  }
  return x;
}

}  // namespace lin_detail

template <typename T>
std::vector<T> dense_solve(DenseMatrix<T> m, const std::vector<T>& b) {
  std::vector<int> perm;
  lin_detail::lu_factor(m, perm);
  return lin_detail::lu_solve_factored(m, perm, b);
}

template <typename T>
DenseMatrix<T> dense_inverse(DenseMatrix<T> m) {
  const int n = m.n;
  std::vector<int> perm;
  lin_detail::lu_factor(m, perm);
  DenseMatrix<T> inv(n);
  std::vector<T> e(n, T{});
  for (int j = 0; j < n; ++j) {
    e.assign(n, T{});
    e[j] = T{1};
    auto col = lin_detail::lu_solve_factored(m, perm, e);
    for (int i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

// ---------------------------------------------------------------------------
// Matrix resolvent kernel
// ---------------------------------------------------------------------------

struct MatrixResolventKernel {
  double alpha;
  DenseMatrix<double> A;  // symmetric positive definite

  MatrixResolventKernel(double alpha_, DenseMatrix<double> A_)
      : alpha(alpha_), A(std::move(A_)) {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::invalid_argument("MatrixResolventKernel: alpha must lie in (0, 1)");
  }

  DenseMatrix<double> eval(double z) const {
    if (!(z > 0.0)) throw std::invalid_argument("MatrixResolventKernel: z > 0 required");
    DenseMatrix<double> m = A;
    double za = std::pow(z, alpha);
    for (int i = 0; i < m.n; ++i) m(i, i) += za;
    return dense_inverse(std::move(m));
  }

  DenseMatrix<std::complex<double>> eval(std::complex<double> z) const {
    DenseMatrix<std::complex<double>> m(A.n);
    for (std::size_t i = 0; i < A.a.size(); ++i) m.a[i] = A.a[i];
    std::complex<double> za = std::pow(z, std::complex<double>(alpha, 0.0));
    for (int i = 0; i < m.n; ++i) m(i, i) += za;
    return dense_inverse(std::move(m));
  }

  // G(x) = sin(pi alpha)/pi x^alpha (x^a e^{-i pi a} I + A)^{-1}
  //                                 (x^a e^{+i pi a} I + A)^{-1}
  // The two factors commute and are conjugates, so the product is the real
  // inverse of x^{2a} I + 2 x^a cos(pi a) A + A^2.
  DenseMatrix<double> density(double x) const {
    double xa = std::pow(x, alpha);
    DenseMatrix<double> m = A.matmul(A);
    m += (2.0 * xa * std::cos(std::numbers::pi * alpha)) * A;
    for (int i = 0; i < m.n; ++i) m(i, i) += xa * xa;
    DenseMatrix<double> inv = dense_inverse(std::move(m));
    double s = std::sin(std::numbers::pi * alpha) / std::numbers::pi * xa;
    return s * inv;
  }

  double density_exponent() const { return -alpha; }
};

}  // namespace gcq
