#pragma once

// Random unsat instances built from families whose infeasibility follows
// from a hand argument with a margin well above the default delta.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

namespace gen {

inline std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v < 0 ? -v : v);
  return v < 0 ? std::string("(- ") + buf + ")" : std::string(buf);
}

struct Instance {
  std::string family;
  std::string text;
};

class UnsatGen {
 public:
  explicit UnsatGen(std::uint64_t seed) : rng_(seed) {}

  Instance next() {
    switch (counter_++ % 6) {
      case 0: return disc();
      case 1: return product();
      case 2: return parabola();
      case 3: return sqrt_sum();
      case 4: return trig_identity();
      default: return sine_band();
    }
  }

 private:
  std::mt19937_64 rng_;
  std::size_t counter_ = 0;

  double uni(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  int pick(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }

  static std::string header(const std::vector<std::pair<double, double>>& bounds) {
    std::string s = "(set-logic QF_NRA)\n";
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      std::string v = "x" + std::to_string(i);
      s += "(declare-fun " + v + " () Real)\n";
      s += "(assert (<= " + num(bounds[i].first) + " " + v + "))\n";
      s += "(assert (<= " + v + " " + num(bounds[i].second) + "))\n";
    }
    return s;
  }

  // Ball whose center lies outside the box, farther than its radius.
  Instance disc() {
    int n = pick(2, 4);
    std::vector<std::pair<double, double>> b;
    std::string sum = "(+";
    double dist2 = 0;
    for (int i = 0; i < n; ++i) {
      double lo = uni(-2, 1), hi = lo + uni(0.5, 2);
      b.push_back({lo, hi});
      double c = i == 0 ? hi + uni(0.3, 1.0) : uni(lo, hi);
      if (i == 0) dist2 += (c - hi) * (c - hi);
      sum += " (^ (- x" + std::to_string(i) + " " + num(c) + ") 2)";
    }
    sum += ")";
    double r2 = dist2 * uni(0.3, 0.8);
    return {"disc", header(b) + "(assert (<= " + sum + " " + num(r2) + "))\n(check-sat)\n"};
  }

  // Product of positive factors above what the box allows.
  Instance product() {
    int n = pick(2, 3);
    std::vector<std::pair<double, double>> b;
    std::string prod = "(*";
    double top = 1;
    for (int i = 0; i < n; ++i) {
      double lo = uni(0.2, 1), hi = lo + uni(0.5, 1.5);
      b.push_back({lo, hi});
      top *= hi;
      prod += " x" + std::to_string(i);
    }
    prod += ")";
    double k = top * uni(1.05, 1.3);
    std::string extra = "(assert (<= (+ x0 x1) " + num(b[0].second + b[1].second + 1) + "))\n";
    return {"product", header(b) + "(assert (>= " + prod + " " + num(k) + "))\n" + extra +
                           "(check-sat)\n"};
  }

  // y - x^2 >= a and y - x^2 <= a - m.
  Instance parabola() {
    std::vector<std::pair<double, double>> b = {{uni(-2, 0), uni(0.5, 2)}, {uni(-1, 0), uni(1, 3)}};
    double a = uni(-1, 1), m = uni(0.05, 0.5);
    std::string f = "(- x1 (* x0 x0))";
    return {"parabola", header(b) + "(assert (>= " + f + " " + num(a) + "))\n(assert (<= " + f +
                            " " + num(a - m) + "))\n(check-sat)\n"};
  }

  // Sum of square roots above its maximum on the box.
  Instance sqrt_sum() {
    int n = pick(2, 4);
    std::vector<std::pair<double, double>> b;
    std::string sum = "(+";
    double top = 0;
    for (int i = 0; i < n; ++i) {
      double lo = uni(0, 2), hi = lo + uni(0.5, 3);
      b.push_back({lo, hi});
      top += std::sqrt(hi);
      sum += " (sqrt x" + std::to_string(i) + ")";
    }
    sum += ")";
    return {"sqrt", header(b) + "(assert (>= " + sum + " " + num(top + uni(0.05, 0.3)) +
                        "))\n(check-sat)\n"};
  }

  // sin^2 + cos^2 bounded away from one.
  Instance trig_identity() {
    std::vector<std::pair<double, double>> b = {{uni(-3, 0), uni(0.2, 3)}, {uni(-1, 0), uni(0.1, 1)}};
    double m = uni(0.05, 0.2);
    std::string f = "(+ (* (sin x0) (sin x0)) (* (cos x0) (cos x0)) (* x1 x1))";
    return {"trig", header(b) + "(assert (<= " + f + " " + num(1 - m) + "))\n(check-sat)\n"};
  }

  // sin(x) + cos(y) above its maximum; x stays below pi/2.
  Instance sine_band() {
    std::vector<std::pair<double, double>> b = {{uni(-1, 0), uni(0.1, 1)}, {uni(-1, 0), uni(0.1, 1)}};
    double top = std::sin(b[0].second) + 1;
    return {"sine", header(b) + "(assert (>= (+ (sin x0) (cos x1)) " + num(top + uni(0.05, 0.2)) +
                        "))\n(check-sat)\n"};
  }
};

}  // namespace gen
