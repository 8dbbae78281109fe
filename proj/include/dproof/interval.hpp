#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dproof {

// Closed connected subset of the extended reals with binary64 endpoints.
// Endpoints are never NaN and -0.0 is stored as +0.0, so equality is
// plain endpoint comparison. A non-empty interval never has lo == +inf
// or hi == -inf.
class Interval {
 public:
  Interval() = default;  // empty
  Interval(double lo, double hi);

  static Interval empty() { return {}; }
  static Interval entire();
  static Interval point(double v) { return {v, v}; }

  bool is_empty() const { return empty_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  bool contains(double v) const { return !empty_ && lo_ <= v && v <= hi_; }
  bool contains_zero() const { return contains(0.0); }
  bool is_point() const { return !empty_ && lo_ == hi_; }
  bool is_bounded() const;
  bool subset_of(const Interval& other) const;
  bool interior_contains(double v) const { return !empty_ && lo_ < v && v < hi_; }

  // Representable value strictly inside the interval, or nullopt when the
  // interval holds fewer than three binary64 values.
  std::optional<double> split_point() const;
  // A finite representative; the split point when it exists.
  double mid() const;

  friend bool operator==(const Interval& a, const Interval& b) {
    if (a.empty_ || b.empty_) return a.empty_ == b.empty_;
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
  bool empty_ = true;
};

Interval intersect(const Interval& a, const Interval& b);
Interval hull(const Interval& a, const Interval& b);

// hi - lo rounded up; 0 for Empty.
double width(const Interval& i);

// True iff every point of i lies in a ∪ b, decided by endpoint comparison.
bool covers_union(const Interval& i, const Interval& a, const Interval& b);

// Operation set shared by the interval layer and the expression IR.
// Sgn is internal: the sign envelope used for abs/min/max subgradients.
enum class Fn {
  add, sub, mul, div, neg, sqr, pow_int, sqrt, exp, log,
  sin, cos, tan, asin, acos, atan, atan2, min, max, abs, sgn,
};

std::string_view fn_name(Fn fn);
std::size_t fn_arity(Fn fn);

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
Interval operator/(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);

Interval sqr(const Interval& x);
Interval pow_int(const Interval& x, int n);
Interval sqrt(const Interval& x);
Interval exp(const Interval& x);
Interval log(const Interval& x);
Interval sin(const Interval& x);
Interval cos(const Interval& x);
Interval tan(const Interval& x);
Interval asin(const Interval& x);
Interval acos(const Interval& x);
Interval atan(const Interval& x);
Interval atan2(const Interval& y, const Interval& x);
Interval min(const Interval& a, const Interval& b);
Interval max(const Interval& a, const Interval& b);
Interval abs(const Interval& x);
Interval sgn(const Interval& x);

// Uniform dispatch. `exponent` is only read for Fn::pow_int.
Interval iv_arith(Fn fn, std::span<const Interval> args, int exponent = 0);

// True iff fn is defined and differentiable at every point of args
// (no clipping to a domain, no pole, no branch cut).
bool regular_on(Fn fn, std::span<const Interval> args, int exponent = 0);

// Enclosures of pi and its common multiples.
Interval pi_interval();
Interval half_pi_interval();

// Lossless hexadecimal float text ("0x1.8p+0", "inf", "-inf").
std::string format_hex(double v);
// "[lo hi]" with hex endpoints or "[empty]".
std::string format_interval(const Interval& i);
// Accepts decimal or hex-float text (and "inf"/"+inf"/"-inf"); returns the
// tightest interval of binary64 values enclosing the literal. Nullopt on
// malformed text.
std::optional<Interval> enclose_literal(std::string_view text);
// Parses an exact binary64 value (hex or decimal that must round-trip).
std::optional<double> parse_double(std::string_view text);

class Box {
 public:
  Box() = default;
  explicit Box(std::vector<Interval> dims) : dims_(std::move(dims)) {}

  std::size_t size() const { return dims_.size(); }
  const Interval& operator[](std::size_t i) const { return dims_[i]; }
  const std::vector<Interval>& dims() const { return dims_; }

  bool is_empty() const;
  // Max component width.
  double max_width() const;
  Box with(std::size_t var, const Interval& value) const;
  bool subset_of(const Box& other) const;
  bool contains(std::span<const double> point) const;
  std::vector<double> midpoint() const;

  friend bool operator==(const Box& a, const Box& b) { return a.dims_ == b.dims_; }

 private:
  std::vector<Interval> dims_;
};

}  // namespace dproof
