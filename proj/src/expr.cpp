#include "dproof/expr.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace dproof {

struct Term::Node {
  Kind kind = Kind::constant;
  VarId var = 0;
  Interval value;
  std::string text;
  Fn fn = Fn::add;
  int exponent = 0;
  std::vector<Term> args;
};

Term Term::variable(VarId id) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::variable;
  n->var = id;
  return Term(std::move(n));
}

Term Term::constant(const Interval& value, std::string text) {
  if (!value.is_bounded()) throw std::invalid_argument("constants must be finite");
  auto n = std::make_shared<Node>();
  n->kind = Kind::constant;
  n->value = value;
  n->text = std::move(text);
  return Term(std::move(n));
}

Term Term::apply(Fn fn, std::vector<Term> args, int exponent) {
  if (args.size() != fn_arity(fn)) {
    throw std::invalid_argument("wrong number of arguments for " + std::string(fn_name(fn)));
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::apply;
  n->fn = fn;
  n->exponent = exponent;
  n->args = std::move(args);
  return Term(std::move(n));
}

Term::Kind Term::kind() const { return node_->kind; }
VarId Term::var() const { return node_->var; }
const Interval& Term::value() const { return node_->value; }
const std::string& Term::text() const { return node_->text; }
Fn Term::fn() const { return node_->fn; }
int Term::exponent() const { return node_->exponent; }
std::span<const Term> Term::args() const { return node_->args; }

bool Term::is_constant(double v) const {
  return node_->kind == Kind::constant && node_->value == Interval::point(v);
}

std::size_t Term::arith_count() const {
  if (node_->kind != Kind::apply) return 0;
  std::size_t n = 1;
  for (const auto& a : node_->args) n += a.arith_count();
  return n;
}

namespace {

void collect_vars(const Term& t, std::vector<VarId>& out, std::set<VarId>& seen) {
  if (t.kind() == Term::Kind::variable) {
    if (seen.insert(t.var()).second) out.push_back(t.var());
    return;
  }
  for (const auto& a : t.args()) collect_vars(a, out, seen);
}

}  // namespace

std::vector<VarId> Term::variables() const {
  std::vector<VarId> out;
  std::set<VarId> seen;
  collect_vars(*this, out, seen);
  return out;
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Term::Kind::variable: return x.var == y.var;
    case Term::Kind::constant: return x.value == y.value;
    case Term::Kind::apply:
      return x.fn == y.fn && x.exponent == y.exponent && x.args == y.args;
  }
  return false;
}

std::string_view rel_name(Rel rel) {
  switch (rel) {
    case Rel::eq: return "=";
    case Rel::ne: return "distinct";
    case Rel::gt: return ">";
    case Rel::ge: return ">=";
    case Rel::lt: return "<";
    case Rel::le: return "<=";
  }
  return "?";
}

// ---- System ----

System::System(std::vector<Variable> variables, std::vector<Atom> atoms)
    : variables_(std::move(variables)), atoms_(std::move(atoms)) {
  if (variables_.empty()) throw std::invalid_argument("system declares no variables");
  if (atoms_.empty()) throw std::invalid_argument("system has no atoms");
  std::set<std::string> names;
  for (const auto& v : variables_) {
    if (v.bounds.is_empty()) throw std::invalid_argument("empty bounds for " + v.name);
    if (!names.insert(v.name).second) throw std::invalid_argument("duplicate variable " + v.name);
  }
  for (const auto& a : atoms_) {
    for (VarId id : a.term.variables()) {
      if (id >= variables_.size()) throw std::invalid_argument("atom references unknown variable");
    }
  }
}

std::optional<VarId> System::find(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  return std::nullopt;
}

Box System::initial_box() const {
  std::vector<Interval> dims;
  dims.reserve(variables_.size());
  for (const auto& v : variables_) dims.push_back(v.bounds);
  return Box(std::move(dims));
}

System System::with_bounds(const Box& box) const {
  if (box.size() != variables_.size()) throw std::invalid_argument("box dimension mismatch");
  std::vector<Variable> vars = variables_;
  for (std::size_t i = 0; i < vars.size(); ++i) vars[i].bounds = box[i];
  return System(std::move(vars), atoms_);
}

std::size_t System::arith_count() const {
  std::size_t n = 0;
  for (const auto& a : atoms_) n += a.term.arith_count();
  return n;
}

namespace {

void print_rec(const Term& t, const System& sys, std::string& out) {
  switch (t.kind()) {
    case Term::Kind::variable:
      out += sys.variables().at(t.var()).name;
      return;
    case Term::Kind::constant: {
      if (!t.text().empty()) {
        out += t.text();
        return;
      }
      const Interval& v = t.value();
      if (v.is_point() && std::floor(v.lo()) == v.lo() && std::fabs(v.lo()) < 0x1p53) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.0f", v.lo());
        out += buf;
      } else if (v.is_point()) {
        out += format_hex(v.lo());
      } else {
        out += format_interval(v);
      }
      return;
    }
    case Term::Kind::apply:
      break;
  }
  out += '(';
  out += fn_name(t.fn());
  for (const auto& a : t.args()) {
    out += ' ';
    print_rec(a, sys, out);
  }
  if (t.fn() == Fn::pow_int) out += ' ' + std::to_string(t.exponent());
  out += ')';
}

std::string bound_text(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return format_hex(v);
}

}  // namespace

std::string print_term(const Term& t, const System& sys) {
  std::string out;
  print_rec(t, sys, out);
  return out;
}

std::string print_atom(const Atom& a, const System& sys) {
  return "(" + std::string(rel_name(a.rel)) + " " + print_term(a.term, sys) + " 0)";
}

std::string System::canonical_text() const {
  std::string out = "(set-logic QF_NRA)\n";
  for (const auto& v : variables_) out += "(declare-fun " + v.name + " () Real)\n";
  for (const auto& v : variables_) {
    out += "(assert (<= " + bound_text(v.bounds.lo()) + " " + v.name + "))\n";
    out += "(assert (<= " + v.name + " " + bound_text(v.bounds.hi()) + "))\n";
  }
  for (const auto& a : atoms_) out += "(assert " + print_atom(a, *this) + ")\n";
  out += "(check-sat)\n";
  return out;
}

std::string System::digest() const {
  const std::string text = canonical_text();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[md[i] >> 4];
    hex += kHex[md[i] & 15];
  }
  return hex;
}

// ---- evaluation ----

namespace {

Interval eval_rec(const Term& t, const Box& b, bool* regular) {
  switch (t.kind()) {
    case Term::Kind::variable: return b[t.var()];
    case Term::Kind::constant: return t.value();
    case Term::Kind::apply: break;
  }
  auto args = t.args();
  std::array<Interval, 2> vals;
  for (std::size_t i = 0; i < args.size(); ++i) {
    vals[i] = eval_rec(args[i], b, regular);
    if (vals[i].is_empty()) {
      if (regular) *regular = false;
      return {};
    }
  }
  std::span<const Interval> in(vals.data(), args.size());
  if (regular && *regular && !regular_on(t.fn(), in, t.exponent())) *regular = false;
  return iv_arith(t.fn(), in, t.exponent());
}

}  // namespace

Interval eval_natural(const Term& t, const Box& b) { return eval_rec(t, b, nullptr); }

Interval eval_natural(const Term& t, const Box& b, bool& regular) {
  return eval_rec(t, b, &regular);
}

bool certifies_false(Rel rel, const Interval& v) {
  if (v.is_empty()) return true;
  switch (rel) {
    case Rel::eq: return !v.contains_zero();
    case Rel::ne: return v == Interval::point(0.0);
    case Rel::gt: return v.hi() <= 0;
    case Rel::ge: return v.hi() < 0;
    case Rel::lt: return v.lo() >= 0;
    case Rel::le: return v.lo() > 0;
  }
  return false;
}

bool certifies_true(Rel rel, const Interval& v) {
  if (v.is_empty()) return false;
  switch (rel) {
    case Rel::eq: return v == Interval::point(0.0);
    case Rel::ne: return !v.contains_zero();
    case Rel::gt: return v.lo() > 0;
    case Rel::ge: return v.lo() >= 0;
    case Rel::lt: return v.hi() < 0;
    case Rel::le: return v.hi() <= 0;
  }
  return false;
}

bool atom_false_on(const Atom& a, const Box& b) {
  if (b.is_empty()) return true;
  return certifies_false(a.rel, eval_natural(a.term, b));
}

bool conjunction_false_on(std::span<const Atom> atoms, const Box& b) {
  if (b.is_empty()) return true;
  return std::any_of(atoms.begin(), atoms.end(),
                     [&](const Atom& a) { return atom_false_on(a, b); });
}

bool satisfied_at(std::span<const Atom> atoms, std::span<const double> point) {
  std::vector<Interval> dims;
  dims.reserve(point.size());
  for (double p : point) {
    if (!std::isfinite(p)) return false;
    dims.push_back(Interval::point(p));
  }
  Box b(std::move(dims));
  for (const auto& a : atoms) {
    bool regular = true;
    Interval v = eval_natural(a.term, b, regular);
    if (!regular || !certifies_true(a.rel, v)) return false;
  }
  return true;
}

}  // namespace dproof
