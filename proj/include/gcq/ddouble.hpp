#pragma once

// Double-double arithmetic: an unevaluated sum of two doubles giving ~31
// significant digits.  Used where plain double loses too many digits to
// cancellation: alternating Mittag-Leffler series and long divided-difference
// windows.  Algorithms follow the classic error-free transformations
// (Dekker/Knuth two_sum, FMA-based two_prod).

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace gcq {

struct ddouble {
  double hi = 0.0;
  double lo = 0.0;

  constexpr ddouble() = default;
  constexpr ddouble(double h) : hi(h), lo(0.0) {}
  constexpr ddouble(double h, double l) : hi(h), lo(l) {}
  constexpr ddouble(int v) : hi(v), lo(0.0) {}
};

namespace dd_detail {

inline ddouble quick_two_sum(double a, double b) {
  // requires |a| >= |b|
  double s = a + b;
  return {s, b - (s - a)};
}

inline ddouble two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline ddouble two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace dd_detail

inline ddouble operator+(ddouble a, ddouble b) {
  using namespace dd_detail;
  ddouble s = two_sum(a.hi, b.hi);
  ddouble t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline ddouble operator-(ddouble a) { return {-a.hi, -a.lo}; }
inline ddouble operator-(ddouble a, ddouble b) { return a + (-b); }

inline ddouble operator*(ddouble a, ddouble b) {
  using namespace dd_detail;
  ddouble p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}

inline ddouble operator/(ddouble a, ddouble b) {
  double q1 = a.hi / b.hi;
  ddouble r = a - b * ddouble(q1);
  double q2 = r.hi / b.hi;
  r = r - b * ddouble(q2);
  double q3 = r.hi / b.hi;
  ddouble q = dd_detail::quick_two_sum(q1, q2);
  return q + ddouble(q3);
}

inline ddouble& operator+=(ddouble& a, ddouble b) { return a = a + b; }
inline ddouble& operator-=(ddouble& a, ddouble b) { return a = a - b; }
inline ddouble& operator*=(ddouble& a, ddouble b) { return a = a * b; }
inline ddouble& operator/=(ddouble& a, ddouble b) { return a = a / b; }

inline bool operator==(ddouble a, ddouble b) { return a.hi == b.hi && a.lo == b.lo; }
inline bool operator<(ddouble a, ddouble b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(ddouble a, ddouble b) { return b < a; }
inline bool operator<=(ddouble a, ddouble b) { return !(b < a); }
inline bool operator>=(ddouble a, ddouble b) { return !(a < b); }

inline double to_double(ddouble a) { return a.hi + a.lo; }
inline ddouble dd_abs(ddouble a) { return a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0) ? -a : a; }
inline ddouble dd_ldexp(ddouble a, int n) { return {std::ldexp(a.hi, n), std::ldexp(a.lo, n)}; }
inline ddouble dd_mul_pwr2(ddouble a, double p) { return {a.hi * p, a.lo * p}; }

inline constexpr ddouble dd_pi{3.141592653589793116e+00, 1.224646799147353207e-16};
inline constexpr ddouble dd_ln2{6.931471805599452862e-01, 2.319046813846299558e-17};

// exp in double-double: argument reduction by ln2 then 2^9 scaling + Taylor.
inline ddouble dd_exp(ddouble a) {
  const double k = 512.0;
  const double inv_k = 1.0 / k;
  if (a.hi <= -709.0) return ddouble(0.0);
  if (a.hi >= 709.0) throw std::overflow_error("dd_exp overflow");
  if (a.hi == 0.0 && a.lo == 0.0) return ddouble(1.0);

  double m = std::floor(a.hi / dd_ln2.hi + 0.5);
  ddouble r = dd_mul_pwr2(a - dd_ln2 * ddouble(m), inv_k);

  ddouble p = r * r;
  ddouble s = r + dd_mul_pwr2(p, 0.5);
  p = p * r;
  double fac = 6.0;
  ddouble t = p / ddouble(fac);
  int i = 3;
  for (;;) {
    s += t;
    p = p * r;
    ++i;
    fac *= i;
    t = p / ddouble(fac);
    if (std::abs(t.hi) <= inv_k * 1e-35 || i > 20) break;
  }
  s += t;

  // undo the 2^9 reduction on s = exp(r) - 1: (1+s)^2 - 1 = 2s + s^2
  for (int j = 0; j < 9; ++j) s = dd_mul_pwr2(s, 2.0) + s * s;
  s += ddouble(1.0);
  return dd_ldexp(s, static_cast<int>(m));
}

// log via one Newton correction of the double seed (quadratic: full dd accuracy).
inline ddouble dd_log(ddouble a) {
  if (a.hi <= 0.0) throw std::domain_error("dd_log requires positive argument");
  ddouble x(std::log(a.hi));
  x = x + a * dd_exp(-x) - ddouble(1.0);
  x = x + a * dd_exp(-x) - ddouble(1.0);
  return x;
}

inline ddouble dd_pow(ddouble a, ddouble b) { return dd_exp(b * dd_log(a)); }

// log Gamma for positive arguments in double-double.  Stirling with exact
// rational Bernoulli coefficients B_{2k}/(2k(2k-1)), argument shifted to
// x >= 30 so that 13 terms reach ~1e-33.
inline ddouble dd_lgamma(ddouble x) {
  if (x.hi <= 0.0) throw std::domain_error("dd_lgamma requires positive argument");
  static const ddouble half_ln_2pi = dd_mul_pwr2(dd_log(dd_mul_pwr2(dd_pi, 2.0)), 0.5);
  static const ddouble coef[13] = {
      ddouble(1.0) / ddouble(12.0),
      ddouble(-1.0) / ddouble(360.0),
      ddouble(1.0) / ddouble(1260.0),
      ddouble(-1.0) / ddouble(1680.0),
      ddouble(1.0) / ddouble(1188.0),
      ddouble(-691.0) / ddouble(360360.0),
      ddouble(1.0) / ddouble(156.0),
      ddouble(-3617.0) / ddouble(122400.0),
      ddouble(43867.0) / ddouble(244188.0),
      ddouble(-174611.0) / ddouble(125400.0),
      ddouble(854513.0) / ddouble(63756.0),
      ddouble(-236364091.0) / ddouble(1507080.0),
      ddouble(8553103.0) / ddouble(3900.0)};

  ddouble shift(0.0);
  ddouble y = x;
  while (y.hi < 30.0) {
    shift += dd_log(y);
    y += ddouble(1.0);
  }
  ddouble ly = dd_log(y);
  ddouble s = (y - ddouble(0.5)) * ly - y + half_ln_2pi;
  ddouble y2 = y * y;
  ddouble ypow = y;
  for (int k = 0; k < 13; ++k) {
    s += coef[k] / ypow;
    ypow *= y2;
  }
  return s - shift;
}

}  // namespace gcq
