#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <random>

#include "dproof/interval.hpp"

using namespace dproof;
using Real = long double;

namespace {

constexpr double kInf = INFINITY;

bool encloses(const Interval& j, Real v) {
  if (std::isnan(v)) return true;  // outside the real domain
  return !j.is_empty() && static_cast<Real>(j.lo()) <= v && v <= static_cast<Real>(j.hi());
}

struct Family {
  const char* name;
  Fn fn;
  int arity;
  double lo, hi;  // sampling range of endpoints
  std::function<bool(Real, Real)> in_domain;
  std::function<Real(Real, Real)> exact;
  int exponent = 0;
};

std::vector<Family> families() {
  auto any = [](Real, Real) { return true; };
  return {
      {"add", Fn::add, 2, -1e6, 1e6, any, [](Real a, Real b) { return a + b; }},
      {"sub", Fn::sub, 2, -1e6, 1e6, any, [](Real a, Real b) { return a - b; }},
      {"mul", Fn::mul, 2, -1e3, 1e3, any, [](Real a, Real b) { return a * b; }},
      {"div", Fn::div, 2, -1e3, 1e3, [](Real, Real b) { return b != 0; },
       [](Real a, Real b) { return a / b; }},
      {"neg", Fn::neg, 1, -1e6, 1e6, any, [](Real a, Real) { return -a; }},
      {"sqr", Fn::sqr, 1, -1e3, 1e3, any, [](Real a, Real) { return a * a; }},
      {"pow3", Fn::pow_int, 1, -50, 50, any, [](Real a, Real) { return a * a * a; }, 3},
      {"pow4", Fn::pow_int, 1, -50, 50, any, [](Real a, Real) { return a * a * a * a; }, 4},
      {"pow-2", Fn::pow_int, 1, -50, 50, [](Real a, Real) { return a != 0; },
       [](Real a, Real) { return 1 / (a * a); }, -2},
      {"sqrt", Fn::sqrt, 1, -10, 1e4, [](Real a, Real) { return a >= 0; },
       [](Real a, Real) { return std::sqrt(a); }},
      {"exp", Fn::exp, 1, -700, 700, any, [](Real a, Real) { return std::exp(a); }},
      {"log", Fn::log, 1, -1, 1e6, [](Real a, Real) { return a > 0; },
       [](Real a, Real) { return std::log(a); }},
      {"sin", Fn::sin, 1, -100, 100, any, [](Real a, Real) { return std::sin(a); }},
      {"cos", Fn::cos, 1, -100, 100, any, [](Real a, Real) { return std::cos(a); }},
      {"tan", Fn::tan, 1, -10, 10, any, [](Real a, Real) { return std::tan(a); }},
      {"asin", Fn::asin, 1, -1.5, 1.5, [](Real a, Real) { return a >= -1 && a <= 1; },
       [](Real a, Real) { return std::asin(a); }},
      {"acos", Fn::acos, 1, -1.5, 1.5, [](Real a, Real) { return a >= -1 && a <= 1; },
       [](Real a, Real) { return std::acos(a); }},
      {"atan", Fn::atan, 1, -1e3, 1e3, any, [](Real a, Real) { return std::atan(a); }},
      {"atan2", Fn::atan2, 2, -10, 10, [](Real a, Real b) { return a != 0 || b != 0; },
       [](Real a, Real b) { return std::atan2(a, b); }},
      {"min", Fn::min, 2, -1e6, 1e6, any, [](Real a, Real b) { return std::fmin(a, b); }},
      {"max", Fn::max, 2, -1e6, 1e6, any, [](Real a, Real b) { return std::fmax(a, b); }},
      {"abs", Fn::abs, 1, -1e6, 1e6, any, [](Real a, Real) { return std::fabs(a); }},
  };
}

// Random interval over [lo, hi]; sometimes a point, sometimes tiny.
Interval random_interval(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::uniform_int_distribution<int> kind(0, 9);
  double a = u(rng);
  switch (kind(rng)) {
    case 0: return Interval::point(a);
    case 1: return {a, std::nextafter(std::nextafter(a, kInf), kInf)};
    case 2: {
      double w = std::fabs(a) * 1e-3 + 1e-3;
      return {a, a + w};
    }
    case 3: return {std::trunc(a), std::trunc(a) + 1};
    default: {
      double b = u(rng);
      return {std::min(a, b), std::max(a, b)};
    }
  }
}

double pick_in(const Interval& i, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> end(0, 7);
  int k = end(rng);
  if (k == 0) return i.lo();
  if (k == 1) return i.hi();
  double t = std::uniform_real_distribution<double>(0, 1)(rng);
  double p = i.lo() + t * (i.hi() - i.lo());
  return std::clamp(p, i.lo(), i.hi());
}

}  // namespace

TEST_CASE("reference enclosures") {
  CHECK(Interval(1, 2) + Interval(3, 4) == Interval(4, 6));
  Interval r = Interval(1, 2) - sqr(Interval(1.7, 2));
  CHECK(r.lo() <= -3);
  CHECK(r.hi() >= -0.89);
  CHECK(!r.contains_zero());
  CHECK(sqr(Interval::empty()).is_empty());
  CHECK(sqrt(Interval(-4, -1)).is_empty());
  CHECK(width(Interval(1.5, 2)) == 0.5);
  CHECK(width(Interval::empty()) == 0);
  CHECK(width(Interval(0, kInf)) == kInf);
  CHECK(covers_union(Interval(1.5, 2), Interval(1.5, 1.7), Interval(1.7, 2)));
  CHECK(!covers_union(Interval(0, 3), Interval(0, 1), Interval(2, 3)));
  CHECK(covers_union(Interval(1, 2), Interval(1, 2), Interval::empty()));
}

TEST_CASE("interval construction") {
  CHECK_THROWS(Interval(2, 1));
  CHECK_THROWS(Interval(NAN, 1));
  CHECK_THROWS(Interval(kInf, kInf));
  CHECK(Interval(-0.0, 0.0) == Interval::point(0.0));
  CHECK(std::signbit(Interval(-0.0, 1).lo()) == false);
  CHECK(!Interval::empty().contains(0));
  CHECK(!Interval::point(1).split_point());
  auto m = Interval(1.5, 2).split_point();
  REQUIRE(m);
  CHECK(*m == 1.75);
}

TEST_CASE("exact operations stay exact") {
  CHECK(Interval(1, 2) * Interval(3, 4) == Interval(3, 8));
  CHECK(Interval(1, 2) / Interval(2, 4) == Interval(0.25, 1));
  CHECK(sqrt(Interval(4, 9)) == Interval(2, 3));
  CHECK(sqr(Interval(-2, 1)) == Interval(0, 4));
  CHECK(pow_int(Interval(-2, 1), 3) == Interval(-8, 1));
  Interval third = Interval(1, 1) / Interval(3, 3);
  CHECK(third.lo() < third.hi());
  CHECK(third.lo() <= 1.0L / 3 );
  CHECK(std::nextafter(third.lo(), kInf) == third.hi());
}

TEST_CASE("division rules") {
  CHECK((Interval(1, 2) / Interval(0, 0)).is_empty());
  CHECK(Interval(1, 2) / Interval(-1, 1) == Interval::entire());
  CHECK(Interval(0, 0) / Interval(-1, 1) == Interval::point(0));
  CHECK(Interval(1, 2) / Interval(0, 1) == Interval(1, kInf));
  CHECK(Interval(1, 2) / Interval(-1, 0) == Interval(-kInf, -1));
  CHECK(Interval(0, 0) * Interval(-kInf, kInf) == Interval::point(0));
}

TEST_CASE("transcendental corner cases") {
  CHECK(sin(Interval(0, 7)) == Interval(-1, 1));
  CHECK(cos(Interval::entire()) == Interval(-1, 1));
  Interval s = sin(Interval(0, 1.5));
  CHECK(s.lo() <= 0);
  CHECK(s.hi() <= 1);
  CHECK(s.hi() >= std::sin(1.5));
  CHECK(tan(Interval(1, 2)) == Interval::entire());
  CHECK(log(Interval(-1, 0)).is_empty());
  CHECK(asin(Interval(2, 3)).is_empty());
  Interval a = atan2(Interval(-1, 1), Interval(-2, -1));
  CHECK(a.contains(M_PI));
  CHECK(a.contains(-M_PI));
  Interval q = atan2(Interval(1, 2), Interval(1, 2));
  CHECK(q.contains(std::atan2(1.0, 2.0)));
  CHECK(q.contains(std::atan2(2.0, 1.0)));
  CHECK(q.hi() < 1.2);
  CHECK(pi_interval().contains(M_PI));
  CHECK(std::nextafter(pi_interval().lo(), kInf) == pi_interval().hi());
}

TEST_CASE("containment property: 10^4 samples per operation family") {
  std::mt19937_64 rng(20260101);
  for (const auto& f : families()) {
    std::size_t violations = 0;
    std::size_t checked = 0;
    while (checked < 10000) {
      Interval a = random_interval(rng, f.lo, f.hi);
      Interval b = random_interval(rng, f.lo, f.hi);
      double x = pick_in(a, rng);
      double y = pick_in(b, rng);
      if (!f.in_domain(x, y)) continue;
      std::vector<Interval> args = {a};
      if (f.arity == 2) args.push_back(b);
      Interval j = iv_arith(f.fn, args, f.exponent);
      Real v = f.exact(x, y);
      if (std::isinf(v)) {
        ++checked;
        continue;
      }
      if (!encloses(j, v)) {
        ++violations;
        MESSAGE(f.name << " " << format_interval(a) << " " << format_interval(b) << " at " << x
                       << "," << y << " -> " << format_interval(j));
      }
      ++checked;
    }
    INFO(f.name);
    CHECK(violations == 0);
  }
}

TEST_CASE("outward monotonicity") {
  std::mt19937_64 rng(7);
  for (const auto& f : families()) {
    std::size_t bad = 0;
    for (int k = 0; k < 2000; ++k) {
      Interval a = random_interval(rng, f.lo, f.hi);
      Interval b = random_interval(rng, f.lo, f.hi);
      Interval sa(pick_in(a, rng), a.hi());
      Interval sb(pick_in(b, rng), b.hi());
      std::vector<Interval> big = {a}, small = {sa};
      if (f.arity == 2) {
        big.push_back(b);
        small.push_back(sb);
      }
      if (!iv_arith(f.fn, small, f.exponent).subset_of(iv_arith(f.fn, big, f.exponent))) ++bad;
    }
    INFO(f.name);
    CHECK(bad == 0);
  }
}

TEST_CASE("empty absorption") {
  for (const auto& f : families()) {
    std::vector<Interval> args = {Interval::empty()};
    if (f.arity == 2) args.push_back(Interval(1, 2));
    CHECK(iv_arith(f.fn, args, f.exponent).is_empty());
    if (f.arity == 2) {
      std::vector<Interval> rev = {Interval(1, 2), Interval::empty()};
      CHECK(iv_arith(f.fn, rev, f.exponent).is_empty());
    }
  }
}

TEST_CASE("covers_union agrees with a brute-force oracle") {
  // Endpoints on the half-integer grid in [-3, 3] (plus infinities). Every
  // gap between such closed intervals contains a quarter-integer probe.
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> e(-7, 7);
  auto endpoint = [&](int k) {
    if (k == -7) return -kInf;
    if (k == 7) return kInf;
    return k * 0.5;
  };
  auto random_iv = [&]() -> Interval {
    if (e(rng) == 0 && e(rng) > 3) return {};
    int a = e(rng), b = e(rng);
    if (a > b) std::swap(a, b);
    if (a == 7) a = 6;
    if (b == -7) b = -6;
    return {endpoint(a), endpoint(b)};
  };
  std::vector<double> probes;
  for (int q = -16; q <= 16; ++q) probes.push_back(q * 0.25);
  probes.push_back(-1e300);
  probes.push_back(1e300);
  std::size_t mismatches = 0;
  for (int k = 0; k < 10000; ++k) {
    Interval i = random_iv(), a = random_iv(), b = random_iv();
    bool oracle = true;
    for (double p : probes) {
      if (i.contains(p) && !a.contains(p) && !b.contains(p)) oracle = false;
    }
    if (oracle != covers_union(i, a, b)) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("literal enclosure and hex text") {
  auto tenth = enclose_literal("0.1");
  REQUIRE(tenth);
  CHECK(tenth->lo() < tenth->hi());
  CHECK(tenth->contains(0.1));
  CHECK(static_cast<Real>(tenth->lo()) < 0.1L);
  CHECK(static_cast<Real>(tenth->hi()) > 0.1L);
  CHECK(enclose_literal("1.5") == Interval::point(1.5));
  CHECK(enclose_literal("0x1.8p+0") == Interval::point(1.5));
  CHECK(!enclose_literal("nan"));
  CHECK(!enclose_literal("x"));
  CHECK(!enclose_literal("1e999"));
  CHECK(format_hex(1.5) == "0x1.8p+0");
  CHECK(format_interval(Interval::empty()) == "[empty]");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e10, 1e10);
  for (int k = 0; k < 1000; ++k) {
    double v = u(rng);
    CHECK(parse_double(format_hex(v)) == v);
  }
  CHECK(parse_double("-inf") == -kInf);
}

TEST_CASE("box basics") {
  Box b({Interval(1.5, 2), Interval(1, 2)});
  CHECK(b.max_width() == 1);
  CHECK(!b.is_empty());
  CHECK(b.with(1, Interval::empty()).is_empty());
  std::vector<double> p = {1.75, 1.5};
  CHECK(b.contains(p));
  CHECK(b.midpoint() == p);
}
