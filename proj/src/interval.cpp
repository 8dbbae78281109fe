#include "dproof/interval.hpp"

#include <algorithm>
#include <cctype>
#include <cfenv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <utility>

#include "rounding.hpp"

namespace dproof {

using namespace rounding;

namespace {

// pi lies strictly between these two adjacent doubles.
constexpr double kPiLo = 0x1.921fb54442d18p+1;
constexpr double kPiHi = 0x1.921fb54442d19p+1;

double clean_zero(double v) { return v == 0.0 ? 0.0 : v; }

// Integer range [first, last] of k such that phase + k*pi may lie in
// [lo, hi]. The range is conservative: it never misses such a k.
std::pair<long long, long long> critical_indices(double lo, double hi,
                                                 const Interval& phase) {
  Interval t_lo = (Interval::point(lo) - phase) / pi_interval();
  Interval t_hi = (Interval::point(hi) - phase) / pi_interval();
  return {static_cast<long long>(std::ceil(t_lo.lo())),
          static_cast<long long>(std::floor(t_hi.hi()))};
}

bool is_even(long long k) { return ((k % 2) + 2) % 2 == 0; }

// Range of sin or cos ("value" is the libm function) over x. Critical
// points sit at phase + k*pi; even k is a maximum, odd k a minimum.
Interval periodic_range(const Interval& x, double (*value)(double),
                        const Interval& phase) {
  if (x.is_empty()) return {};
  const Interval unit(-1.0, 1.0);
  if (!x.is_bounded() || std::fabs(x.lo()) > 0x1p50 ||
      std::fabs(x.hi()) > 0x1p50 || x.hi() - x.lo() >= 6.5) {
    return unit;
  }
  auto [first, last] = critical_indices(x.lo(), x.hi(), phase);
  bool has_max = false;
  bool has_min = false;
  for (long long k = first; k <= last && !(has_max && has_min); ++k) {
    (is_even(k) ? has_max : has_min) = true;
  }
  double a = value(x.lo());
  double b = value(x.hi());
  double lo = has_min ? -1.0 : std::max(-1.0, widen_down(std::min(a, b)));
  double hi = has_max ? 1.0 : std::min(1.0, widen_up(std::max(a, b)));
  return {lo, hi};
}

Interval monotone_libm(const Interval& x, double (*f)(double)) {
  if (x.is_empty()) return {};
  return {widen_down(f(x.lo())), widen_up(f(x.hi()))};
}

double pow_nonneg_down(double a, int n) {
  double result = 1.0;
  double base = a;
  while (n > 0) {
    if (n & 1) result = mul_down(result, base);
    n >>= 1;
    if (n > 0) base = mul_down(base, base);
  }
  return result;
}

double pow_nonneg_up(double a, int n) {
  double result = 1.0;
  double base = a;
  while (n > 0) {
    if (n & 1) result = mul_up(result, base);
    n >>= 1;
    if (n > 0) base = mul_up(base, base);
  }
  return result;
}

// Signed powers for odd n.
double pow_odd_down(double a, int n) {
  return a >= 0 ? pow_nonneg_down(a, n) : -pow_nonneg_up(-a, n);
}
double pow_odd_up(double a, int n) {
  return a >= 0 ? pow_nonneg_up(a, n) : -pow_nonneg_down(-a, n);
}

std::optional<double> strtod_rounded(const std::string& s, int mode) {
  const int saved = std::fegetround();
  std::fesetround(mode);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  std::fesetround(saved);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

bool literal_syntax_ok(std::string_view t) {
  if (t.empty()) return false;
  std::size_t i = 0;
  if (t[i] == '+' || t[i] == '-') ++i;
  if (i >= t.size()) return false;
  // Reject strtod's extras (nan, inf, leading spaces).
  return std::isdigit(static_cast<unsigned char>(t[i])) ||
         (t[i] == '.' && i + 1 < t.size() &&
          std::isdigit(static_cast<unsigned char>(t[i + 1])));
}

}  // namespace

Interval::Interval(double lo, double hi) : lo_(clean_zero(lo)), hi_(clean_zero(hi)), empty_(false) {
  if (std::isnan(lo) || std::isnan(hi)) throw std::invalid_argument("interval endpoint is NaN");
  if (lo > hi) throw std::invalid_argument("interval with lo > hi");
  if (lo == kInf || hi == -kInf) throw std::invalid_argument("interval at infinity");
}

Interval Interval::entire() { return {-kInf, kInf}; }

bool Interval::is_bounded() const {
  return !empty_ && std::isfinite(lo_) && std::isfinite(hi_);
}

bool Interval::subset_of(const Interval& other) const {
  if (empty_) return true;
  if (other.empty_) return false;
  return other.lo_ <= lo_ && hi_ <= other.hi_;
}

std::optional<double> Interval::split_point() const {
  if (empty_ || lo_ == hi_) return std::nullopt;
  double m;
  if (std::isinf(lo_) && std::isinf(hi_)) {
    m = 0.0;
  } else if (std::isinf(hi_)) {
    m = lo_ < 0 ? 0.0 : (lo_ == 0 ? 1.0 : std::min(DBL_MAX, 2 * lo_));
  } else if (std::isinf(lo_)) {
    m = hi_ > 0 ? 0.0 : (hi_ == 0 ? -1.0 : std::max(-DBL_MAX, 2 * hi_));
  } else {
    m = 0.5 * lo_ + 0.5 * hi_;
    if (m <= lo_) m = next_up(lo_);
    if (m >= hi_) m = next_down(hi_);
  }
  if (!(lo_ < m && m < hi_)) return std::nullopt;
  return clean_zero(m);
}

double Interval::mid() const {
  if (empty_) return 0.0;
  if (auto m = split_point()) return *m;
  if (std::isfinite(lo_)) return lo_;
  return std::isfinite(hi_) ? hi_ : 0.0;
}

Interval intersect(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return {};
  double lo = std::max(a.lo(), b.lo());
  double hi = std::min(a.hi(), b.hi());
  if (lo > hi) return {};
  return {lo, hi};
}

Interval hull(const Interval& a, const Interval& b) {
  if (a.is_empty()) return b;
  if (b.is_empty()) return a;
  return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

double width(const Interval& i) {
  if (i.is_empty()) return 0.0;
  if (std::isinf(i.lo()) || std::isinf(i.hi())) return kInf;
  return sub_up(i.hi(), i.lo());
}

bool covers_union(const Interval& i, const Interval& a, const Interval& b) {
  if (i.is_empty()) return true;
  if (a.is_empty()) return i.subset_of(b);
  if (b.is_empty()) return i.subset_of(a);
  const Interval& first = a.lo() <= b.lo() ? a : b;
  const Interval& second = a.lo() <= b.lo() ? b : a;
  if (first.hi() >= second.lo()) {
    return i.subset_of(Interval(first.lo(), std::max(first.hi(), second.hi())));
  }
  // Disjoint closed pieces with an open gap between them.
  return i.subset_of(first) || i.subset_of(second);
}

std::string_view fn_name(Fn fn) {
  switch (fn) {
    case Fn::add: return "+";
    case Fn::sub: return "-";
    case Fn::mul: return "*";
    case Fn::div: return "/";
    case Fn::neg: return "-";
    case Fn::sqr: return "sqr";
    case Fn::pow_int: return "^";
    case Fn::sqrt: return "sqrt";
    case Fn::exp: return "exp";
    case Fn::log: return "log";
    case Fn::sin: return "sin";
    case Fn::cos: return "cos";
    case Fn::tan: return "tan";
    case Fn::asin: return "asin";
    case Fn::acos: return "acos";
    case Fn::atan: return "atan";
    case Fn::atan2: return "atan2";
    case Fn::min: return "min";
    case Fn::max: return "max";
    case Fn::abs: return "abs";
    case Fn::sgn: return "sgn";
  }
  return "?";
}

std::size_t fn_arity(Fn fn) {
  switch (fn) {
    case Fn::add:
    case Fn::sub:
    case Fn::mul:
    case Fn::div:
    case Fn::atan2:
    case Fn::min:
    case Fn::max:
      return 2;
    default:
      return 1;
  }
}

Interval operator+(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return {};
  return {add_down(a.lo(), b.lo()), add_up(a.hi(), b.hi())};
}

Interval operator-(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return {};
  return {sub_down(a.lo(), b.hi()), sub_up(a.hi(), b.lo())};
}

Interval operator-(const Interval& a) {
  if (a.is_empty()) return {};
  return {-a.hi(), -a.lo()};
}

Interval operator*(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return {};
  const double corners[4][2] = {{a.lo(), b.lo()}, {a.lo(), b.hi()},
                                {a.hi(), b.lo()}, {a.hi(), b.hi()}};
  double lo = kInf;
  double hi = -kInf;
  for (const auto& c : corners) {
    lo = std::min(lo, mul_down(c[0], c[1]));
    hi = std::max(hi, mul_up(c[0], c[1]));
  }
  return {lo, hi};
}

Interval operator/(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return {};
  if (b.lo() == 0 && b.hi() == 0) return {};
  if (a.lo() == 0 && a.hi() == 0) return Interval::point(0.0);
  if (b.lo() > 0 || b.hi() < 0) {
    const double corners[4][2] = {{a.lo(), b.lo()}, {a.lo(), b.hi()},
                                  {a.hi(), b.lo()}, {a.hi(), b.hi()}};
    double lo = kInf;
    double hi = -kInf;
    for (const auto& c : corners) {
      lo = std::min(lo, div_down(c[0], c[1]));
      hi = std::max(hi, div_up(c[0], c[1]));
    }
    return {lo, hi};
  }
  if (b.lo() < 0 && b.hi() > 0) return Interval::entire();
  if (b.lo() == 0) {  // divisor in (0, d]
    if (a.lo() >= 0) return {div_down(a.lo(), b.hi()), kInf};
    if (a.hi() <= 0) return {-kInf, div_up(a.hi(), b.hi())};
    return Interval::entire();
  }
  // divisor in [c, 0)
  if (a.lo() >= 0) return {-kInf, div_up(a.lo(), b.lo())};
  if (a.hi() <= 0) return {div_down(a.hi(), b.lo()), kInf};
  return Interval::entire();
}

Interval sqr(const Interval& x) {
  if (x.is_empty()) return {};
  if (x.lo() >= 0) return {mul_down(x.lo(), x.lo()), mul_up(x.hi(), x.hi())};
  if (x.hi() <= 0) return {mul_down(x.hi(), x.hi()), mul_up(x.lo(), x.lo())};
  return {0.0, std::max(mul_up(x.lo(), x.lo()), mul_up(x.hi(), x.hi()))};
}

Interval pow_int(const Interval& x, int n) {
  if (x.is_empty()) return {};
  if (n == 0) return Interval::point(1.0);
  if (n == 1) return x;
  if (n == 2) return sqr(x);
  if (n < 0) {
    if (n == std::numeric_limits<int>::min()) return Interval::entire();
    return Interval::point(1.0) / pow_int(x, -n);
  }
  if (n % 2 == 1) return {pow_odd_down(x.lo(), n), pow_odd_up(x.hi(), n)};
  if (x.lo() >= 0) return {pow_nonneg_down(x.lo(), n), pow_nonneg_up(x.hi(), n)};
  if (x.hi() <= 0) return {pow_nonneg_down(-x.hi(), n), pow_nonneg_up(-x.lo(), n)};
  return {0.0, pow_nonneg_up(std::max(-x.lo(), x.hi()), n)};
}

Interval sqrt(const Interval& x) {
  Interval d = intersect(x, Interval(0.0, kInf));
  if (d.is_empty()) return {};
  return {sqrt_down(d.lo()), sqrt_up(d.hi())};
}

Interval exp(const Interval& x) {
  if (x.is_empty()) return {};
  double lo = std::max(0.0, widen_down(std::exp(x.lo())));
  return {lo, widen_up(std::exp(x.hi()))};
}

Interval log(const Interval& x) {
  if (x.is_empty() || x.hi() <= 0) return {};
  double lo = x.lo() <= 0 ? -kInf : widen_down(std::log(x.lo()));
  return {lo, widen_up(std::log(x.hi()))};
}

Interval sin(const Interval& x) {
  return periodic_range(x, [](double v) { return std::sin(v); }, half_pi_interval());
}

Interval cos(const Interval& x) {
  return periodic_range(x, [](double v) { return std::cos(v); }, Interval::point(0.0));
}

Interval tan(const Interval& x) {
  if (x.is_empty()) return {};
  if (!x.is_bounded() || x.hi() - x.lo() >= 3.2 || std::fabs(x.lo()) > 0x1p50 ||
      std::fabs(x.hi()) > 0x1p50) {
    return Interval::entire();
  }
  auto [first, last] = critical_indices(x.lo(), x.hi(), half_pi_interval());
  if (first <= last) return Interval::entire();
  return monotone_libm(x, [](double v) { return std::tan(v); });
}

Interval asin(const Interval& x) {
  Interval d = intersect(x, Interval(-1.0, 1.0));
  if (d.is_empty()) return {};
  double cap = half_pi_interval().hi();
  Interval r = monotone_libm(d, [](double v) { return std::asin(v); });
  return {std::max(-cap, r.lo()), std::min(cap, r.hi())};
}

Interval acos(const Interval& x) {
  Interval d = intersect(x, Interval(-1.0, 1.0));
  if (d.is_empty()) return {};
  double lo = std::max(0.0, widen_down(std::acos(d.hi())));
  double hi = std::min(kPiHi, widen_up(std::acos(d.lo())));
  return {lo, hi};
}

Interval atan(const Interval& x) {
  if (x.is_empty()) return {};
  double cap = half_pi_interval().hi();
  Interval r = monotone_libm(x, [](double v) { return std::atan(v); });
  return {std::max(-cap, r.lo()), std::min(cap, r.hi())};
}

Interval atan2(const Interval& y, const Interval& x) {
  if (y.is_empty() || x.is_empty()) return {};
  const Interval full(-kPiHi, kPiHi);
  // Origin or the branch cut along the negative x axis.
  if (y.contains_zero() && x.lo() < 0) return full;
  if (y.contains_zero() && x.contains_zero()) return full;
  // The box misses the origin and the cut, so the angle is continuous on it
  // and its extremes are attained at corners.
  double lo = kInf;
  double hi = -kInf;
  for (double yy : {y.lo(), y.hi()}) {
    for (double xx : {x.lo(), x.hi()}) {
      double a = std::atan2(clean_zero(yy), clean_zero(xx));
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
  }
  return {std::max(-kPiHi, widen_down(lo)), std::min(kPiHi, widen_up(hi))};
}

Interval min(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return {};
  return {std::min(a.lo(), b.lo()), std::min(a.hi(), b.hi())};
}

Interval max(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return {};
  return {std::max(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

Interval abs(const Interval& x) {
  if (x.is_empty()) return {};
  if (x.lo() >= 0) return x;
  if (x.hi() <= 0) return -x;
  return {0.0, std::max(-x.lo(), x.hi())};
}

Interval sgn(const Interval& x) {
  if (x.is_empty()) return {};
  if (x.lo() > 0) return Interval::point(1.0);
  if (x.hi() < 0) return Interval::point(-1.0);
  return {-1.0, 1.0};
}

Interval iv_arith(Fn fn, std::span<const Interval> args, int exponent) {
  if (args.size() != fn_arity(fn)) throw std::invalid_argument("iv_arith arity mismatch");
  const Interval& a = args[0];
  switch (fn) {
    case Fn::add: return a + args[1];
    case Fn::sub: return a - args[1];
    case Fn::mul: return a * args[1];
    case Fn::div: return a / args[1];
    case Fn::neg: return -a;
    case Fn::sqr: return sqr(a);
    case Fn::pow_int: return pow_int(a, exponent);
    case Fn::sqrt: return sqrt(a);
    case Fn::exp: return exp(a);
    case Fn::log: return log(a);
    case Fn::sin: return sin(a);
    case Fn::cos: return cos(a);
    case Fn::tan: return tan(a);
    case Fn::asin: return asin(a);
    case Fn::acos: return acos(a);
    case Fn::atan: return atan(a);
    case Fn::atan2: return atan2(a, args[1]);
    case Fn::min: return min(a, args[1]);
    case Fn::max: return max(a, args[1]);
    case Fn::abs: return abs(a);
    case Fn::sgn: return sgn(a);
  }
  return {};
}

bool regular_on(Fn fn, std::span<const Interval> args, int exponent) {
  for (const auto& a : args) {
    if (a.is_empty()) return false;
  }
  const Interval& a = args[0];
  switch (fn) {
    case Fn::div: return !args[1].contains_zero();
    case Fn::pow_int: return exponent >= 0 || !a.contains_zero();
    case Fn::sqrt:
    case Fn::log: return a.lo() > 0;
    case Fn::asin:
    case Fn::acos: return a.lo() > -1 && a.hi() < 1;
    case Fn::tan: return tan(a) != Interval::entire();
    case Fn::atan2: {
      const Interval& x = args[1];
      if (a.contains_zero() && x.lo() <= 0) return false;
      return true;
    }
    default:
      // Polynomial operations, exp, sin, cos, atan are smooth everywhere.
      // abs/min/max kinks are handled by the subgradient envelope and sgn is
      // only ever evaluated, never differentiated.
      return true;
  }
}

Interval pi_interval() { return {kPiLo, kPiHi}; }
Interval half_pi_interval() { return {kPiLo * 0.5, kPiHi * 0.5}; }

std::string format_hex(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", clean_zero(v));
  return buf;
}

std::string format_interval(const Interval& i) {
  if (i.is_empty()) return "[empty]";
  return "[" + format_hex(i.lo()) + " " + format_hex(i.hi()) + "]";
}

std::optional<Interval> enclose_literal(std::string_view text) {
  if (!literal_syntax_ok(text)) return std::nullopt;
  std::string s(text);
  auto lo = strtod_rounded(s, FE_DOWNWARD);
  auto hi = strtod_rounded(s, FE_UPWARD);
  if (!lo || !hi || !std::isfinite(*lo) || !std::isfinite(*hi)) return std::nullopt;
  return Interval(*lo, *hi);
}

std::optional<double> parse_double(std::string_view text) {
  if (text == "inf" || text == "+inf") return kInf;
  if (text == "-inf") return -kInf;
  if (!literal_syntax_ok(text)) return std::nullopt;
  auto enc = enclose_literal(text);
  if (!enc || !enc->is_point()) return std::nullopt;
  return enc->lo();
}

bool Box::is_empty() const {
  return std::any_of(dims_.begin(), dims_.end(), [](const Interval& i) { return i.is_empty(); });
}

double Box::max_width() const {
  double w = 0.0;
  for (const auto& d : dims_) w = std::max(w, width(d));
  return w;
}

Box Box::with(std::size_t var, const Interval& value) const {
  Box copy = *this;
  copy.dims_.at(var) = value;
  return copy;
}

bool Box::subset_of(const Box& other) const {
  if (size() != other.size()) return false;
  if (is_empty()) return true;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!dims_[i].subset_of(other.dims_[i])) return false;
  }
  return true;
}

bool Box::contains(std::span<const double> point) const {
  if (point.size() != size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!dims_[i].contains(point[i])) return false;
  }
  return true;
}

std::vector<double> Box::midpoint() const {
  std::vector<double> m;
  m.reserve(size());
  for (const auto& d : dims_) m.push_back(d.mid());
  return m;
}

}  // namespace dproof
