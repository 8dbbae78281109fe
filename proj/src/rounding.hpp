#pragma once

// Directed rounding on top of round-to-nearest. Each helper computes the
// nearest result and uses an error-free transformation (two-sum or an fma
// residual) to decide whether the exact value lies below or above it; only
// then is the result moved one ULP outward. Below kTiny the residual may not
// be exact, so the result is widened unconditionally.

#include <cfloat>
#include <cmath>
#include <limits>

namespace dproof::rounding {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kTiny = 0x1p-900;

inline double next_down(double x) { return std::nextafter(x, -kInf); }
inline double next_up(double x) { return std::nextafter(x, kInf); }

inline double add_down(double a, double b) {
  double s = a + b;
  if (std::isinf(s)) {
    if (std::isinf(a) || std::isinf(b)) return s;
    return s > 0 ? DBL_MAX : s;
  }
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return err < 0 ? next_down(s) : s;
}

inline double add_up(double a, double b) {
  double s = a + b;
  if (std::isinf(s)) {
    if (std::isinf(a) || std::isinf(b)) return s;
    return s < 0 ? -DBL_MAX : s;
  }
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return err > 0 ? next_up(s) : s;
}

inline double sub_down(double a, double b) { return add_down(a, -b); }
inline double sub_up(double a, double b) { return add_up(a, -b); }

// 0 * inf is taken as 0: an endpoint product with a zero factor.
inline double mul_down(double a, double b) {
  if (a == 0 || b == 0) return 0.0;
  double p = a * b;
  if (std::isinf(p)) {
    if (std::isinf(a) || std::isinf(b)) return p;
    return p > 0 ? DBL_MAX : p;
  }
  if (std::fabs(p) < kTiny) return next_down(p);
  double err = std::fma(a, b, -p);
  return err < 0 ? next_down(p) : p;
}

inline double mul_up(double a, double b) {
  if (a == 0 || b == 0) return 0.0;
  double p = a * b;
  if (std::isinf(p)) {
    if (std::isinf(a) || std::isinf(b)) return p;
    return p < 0 ? -DBL_MAX : p;
  }
  if (std::fabs(p) < kTiny) return next_up(p);
  double err = std::fma(a, b, -p);
  return err > 0 ? next_up(p) : p;
}

// b != 0. Quotients of two infinities contribute 0 (the hull of the
// remaining corners supplies the unbounded side).
inline double div_down(double a, double b) {
  if (a == 0) return 0.0;
  if (std::isinf(a) && std::isinf(b)) return (a > 0) == (b > 0) ? 0.0 : -kInf;
  double q = a / b;
  if (std::isinf(b)) return 0.0;
  if (std::isinf(q)) {
    if (std::isinf(a)) return q;
    return q > 0 ? DBL_MAX : q;
  }
  if (std::fabs(a) < kTiny || std::fabs(q) < kTiny) return next_down(q);
  double r = std::fma(-q, b, a);  // a - q*b, exact
  bool below = r != 0 && ((r > 0) != (b > 0));
  return below ? next_down(q) : q;
}

inline double div_up(double a, double b) {
  if (a == 0) return 0.0;
  if (std::isinf(a) && std::isinf(b)) return (a > 0) == (b > 0) ? kInf : 0.0;
  double q = a / b;
  if (std::isinf(b)) return 0.0;
  if (std::isinf(q)) {
    if (std::isinf(a)) return q;
    return q < 0 ? -DBL_MAX : q;
  }
  if (std::fabs(a) < kTiny || std::fabs(q) < kTiny) return next_up(q);
  double r = std::fma(-q, b, a);
  bool above = r != 0 && ((r > 0) == (b > 0));
  return above ? next_up(q) : q;
}

// a >= 0.
inline double sqrt_down(double a) {
  if (a == 0 || std::isinf(a)) return a;
  double r = std::sqrt(a);
  if (a < kTiny) return next_down(r);
  double res = std::fma(-r, r, a);
  return res < 0 ? next_down(r) : r;
}

inline double sqrt_up(double a) {
  if (a == 0 || std::isinf(a)) return a;
  double r = std::sqrt(a);
  if (a < kTiny) return next_up(r);
  double res = std::fma(-r, r, a);
  return res > 0 ? next_up(r) : r;
}

// Two ULPs outward, for libm results that are only faithfully rounded.
inline double widen_down(double x) {
  if (std::isinf(x)) return x > 0 ? DBL_MAX : x;
  return next_down(next_down(x));
}

inline double widen_up(double x) {
  if (std::isinf(x)) return x < 0 ? -DBL_MAX : x;
  return next_up(next_up(x));
}

}  // namespace dproof::rounding
