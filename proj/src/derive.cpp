#include "dproof/expr.hpp"

namespace dproof {

namespace {

Term num(double v) { return Term::constant(Interval::point(v)); }

bool is_zero(const Term& t) { return t.is_constant(0.0); }
bool is_one(const Term& t) { return t.is_constant(1.0); }

Term add(const Term& a, const Term& b) {
  if (is_zero(a)) return b;
  if (is_zero(b)) return a;
  return Term::apply(Fn::add, {a, b});
}

Term neg(const Term& a) {
  if (is_zero(a)) return a;
  if (a.kind() == Term::Kind::apply && a.fn() == Fn::neg) return a.args()[0];
  return Term::apply(Fn::neg, {a});
}

Term sub(const Term& a, const Term& b) {
  if (is_zero(b)) return a;
  if (is_zero(a)) return neg(b);
  return Term::apply(Fn::sub, {a, b});
}

Term mul(const Term& a, const Term& b) {
  if (is_zero(a) || is_zero(b)) return num(0.0);
  if (is_one(a)) return b;
  if (is_one(b)) return a;
  return Term::apply(Fn::mul, {a, b});
}

Term div(const Term& a, const Term& b) {
  if (is_zero(a)) return num(0.0);
  if (is_one(b)) return a;
  return Term::apply(Fn::div, {a, b});
}

Term pow(const Term& a, int n) {
  if (n == 0) return num(1.0);
  if (n == 1) return a;
  return Term::apply(Fn::pow_int, {a}, n);
}

Term unary(Fn fn, const Term& a) { return Term::apply(fn, {a}); }

class Deriver {
 public:
  Deriver(VarId v, DeriveOptions opt) : v_(v), opt_(opt) {}

  Term d(const Term& t) const {
    switch (t.kind()) {
      case Term::Kind::variable: return num(t.var() == v_ ? 1.0 : 0.0);
      case Term::Kind::constant: return num(0.0);
      case Term::Kind::apply: break;
    }
    if (!mentions(t)) return num(0.0);
    auto args = t.args();
    const Term& u = args[0];
    Term du = d(u);
    switch (t.fn()) {
      case Fn::add: return add(du, d(args[1]));
      case Fn::sub: return sub(du, d(args[1]));
      case Fn::neg: return neg(du);
      case Fn::mul: {
        const Term& w = args[1];
        return add(mul(du, w), mul(u, d(w)));
      }
      case Fn::div: {
        const Term& w = args[1];
        Term dw = d(w);
        if (is_zero(dw)) return div(du, w);
        return div(sub(mul(du, w), mul(u, dw)), pow(w, 2));
      }
      case Fn::sqr: return mul(mul(num(2.0), u), du);
      case Fn::pow_int: {
        int n = t.exponent();
        if (n == 0 || is_zero(du)) return num(0.0);
        return mul(mul(num(n), pow(u, n - 1)), du);
      }
      case Fn::sqrt: return div(du, mul(num(2.0), t));
      case Fn::exp: return mul(t, du);
      case Fn::log: return div(du, u);
      case Fn::sin: return mul(unary(Fn::cos, u), du);
      case Fn::cos: return neg(mul(unary(Fn::sin, u), du));
      case Fn::tan: return mul(add(num(1.0), pow(t, 2)), du);
      case Fn::asin: return div(du, unary(Fn::sqrt, sub(num(1.0), pow(u, 2))));
      case Fn::acos: return neg(div(du, unary(Fn::sqrt, sub(num(1.0), pow(u, 2)))));
      case Fn::atan: return div(du, add(num(1.0), pow(u, 2)));
      case Fn::atan2: {
        // atan2(y, x): (x y' - y x') / (x^2 + y^2)
        const Term& x = args[1];
        Term dx = d(x);
        return div(sub(mul(x, du), mul(u, dx)), add(pow(x, 2), pow(u, 2)));
      }
      case Fn::abs:
        require_envelope(t);
        return mul(unary(Fn::sgn, u), du);
      case Fn::min:
      case Fn::max: {
        require_envelope(t);
        // min/max(u, w) = (u + w -/+ |u - w|) / 2
        const Term& w = args[1];
        Term dw = d(w);
        Term dabs = mul(unary(Fn::sgn, sub(u, w)), sub(du, dw));
        Term sum = add(du, dw);
        Term body = t.fn() == Fn::min ? sub(sum, dabs) : add(sum, dabs);
        return div(body, num(2.0));
      }
      case Fn::sgn:
        throw NonDifferentiable("sgn has no derivative envelope");
    }
    throw NonDifferentiable("unsupported operation");
  }

 private:
  VarId v_;
  DeriveOptions opt_;

  bool mentions(const Term& t) const {
    if (t.kind() == Term::Kind::variable) return t.var() == v_;
    for (const auto& a : t.args()) {
      if (mentions(a)) return true;
    }
    return false;
  }

  void require_envelope(const Term& t) const {
    if (!opt_.subgradient_envelope) {
      throw NonDifferentiable(std::string(fn_name(t.fn())) + " is not differentiable");
    }
  }
};

}  // namespace

Term derive(const Term& t, VarId v, DeriveOptions options) {
  return Deriver(v, options).d(t);
}

}  // namespace dproof
