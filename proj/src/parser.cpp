// Strict SMT-LIB 2 subset: QF_NRA declarations, bounds and relational atoms.

#include <cctype>
#include <cmath>
#include <map>
#include <optional>

#include "dproof/expr.hpp"

namespace dproof {

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

namespace {

struct SExpr {
  bool is_atom = true;
  std::string text;
  std::vector<SExpr> items;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Reader {
 public:
  explicit Reader(std::string_view src) : src_(src) {}

  std::optional<SExpr> next() {
    skip_space();
    if (pos_ >= src_.size()) return std::nullopt;
    return read();
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, col_); }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ';') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read() {
    SExpr e;
    e.line = line_;
    e.column = col_;
    char c = src_[pos_];
    if (c == ')') fail("unexpected ')'");
    if (c == '(') {
      advance();
      e.is_atom = false;
      for (;;) {
        skip_space();
        if (pos_ >= src_.size()) throw ParseError("unclosed '('", e.line, e.column);
        if (src_[pos_] == ')') {
          advance();
          return e;
        }
        e.items.push_back(read());
      }
    }
    if (c == '|' || c == '"') {
      char close = c;
      advance();
      std::size_t start = pos_;
      while (pos_ < src_.size() && src_[pos_] != close) advance();
      if (pos_ >= src_.size()) throw ParseError("unterminated quoted token", e.line, e.column);
      e.text = std::string(src_.substr(start, pos_ - start));
      if (close == '"') e.text = "\"" + e.text + "\"";
      advance();
      return e;
    }
    std::size_t start = pos_;
    while (pos_ < src_.size()) {
      char d = src_[pos_];
      if (d == '(' || d == ')' || d == ';' || d == ' ' || d == '\t' || d == '\r' || d == '\n') break;
      advance();
    }
    e.text = std::string(src_.substr(start, pos_ - start));
    return e;
  }
};

[[noreturn]] void fail_at(const SExpr& e, const std::string& msg) {
  throw ParseError(msg, e.line, e.column);
}

bool head_is(const SExpr& e, std::string_view name) {
  return !e.is_atom && !e.items.empty() && e.items[0].is_atom && e.items[0].text == name;
}

std::optional<Rel> rel_of(std::string_view s) {
  if (s == "=") return Rel::eq;
  if (s == "distinct") return Rel::ne;
  if (s == ">") return Rel::gt;
  if (s == ">=") return Rel::ge;
  if (s == "<") return Rel::lt;
  if (s == "<=") return Rel::le;
  return std::nullopt;
}

Rel negate(Rel r) {
  switch (r) {
    case Rel::eq: return Rel::ne;
    case Rel::ne: return Rel::eq;
    case Rel::gt: return Rel::le;
    case Rel::ge: return Rel::lt;
    case Rel::lt: return Rel::ge;
    case Rel::le: return Rel::gt;
  }
  return r;
}

const std::map<std::string_view, Fn>& unary_fns() {
  static const std::map<std::string_view, Fn> m = {
      {"sqrt", Fn::sqrt}, {"exp", Fn::exp},   {"log", Fn::log},   {"sin", Fn::sin},
      {"cos", Fn::cos},   {"tan", Fn::tan},   {"asin", Fn::asin}, {"acos", Fn::acos},
      {"atan", Fn::atan}, {"abs", Fn::abs},
  };
  return m;
}

const std::map<std::string_view, Fn>& binary_fns() {
  static const std::map<std::string_view, Fn> m = {
      {"atan2", Fn::atan2}, {"min", Fn::min}, {"max", Fn::max}};
  return m;
}

struct PendingVar {
  std::string name;
  std::optional<double> lo;
  std::optional<double> hi;
  std::size_t line;
  std::size_t column;
};

class Builder {
 public:
  void run(std::string_view text) {
    Reader reader(text);
    while (auto cmd = reader.next()) {
      if (done_) continue;
      command(*cmd);
    }
  }

  System finish(std::size_t eof_line) {
    if (atoms_.empty()) throw ParseError("no constraints asserted", eof_line, 1);
    std::vector<Variable> vars;
    for (const auto& v : vars_) {
      if (!v.lo || !v.hi) {
        throw ParseError("variable " + v.name + " is unbounded; give explicit bounds (use -inf/+inf)",
                         v.line, v.column);
      }
      if (*v.lo > *v.hi || *v.lo == INFINITY || *v.hi == -INFINITY) {
        throw ParseError("empty bounds for variable " + v.name, v.line, v.column);
      }
      vars.push_back({v.name, Interval(*v.lo, *v.hi)});
    }
    if (vars.empty()) throw ParseError("no variables declared", eof_line, 1);
    return System(std::move(vars), std::move(atoms_));
  }

 private:
  std::vector<PendingVar> vars_;
  std::map<std::string, VarId, std::less<>> index_;
  std::vector<Atom> atoms_;
  bool done_ = false;

  void command(const SExpr& c) {
    if (c.is_atom || c.items.empty() || !c.items[0].is_atom) fail_at(c, "expected a command");
    const std::string& name = c.items[0].text;
    if (name == "set-logic") {
      if (c.items.size() != 2 || c.items[1].text != "QF_NRA") fail_at(c, "only QF_NRA is supported");
    } else if (name == "set-info" || name == "set-option") {
      // ignored
    } else if (name == "declare-fun") {
      if (c.items.size() != 4 || !c.items[1].is_atom || c.items[2].is_atom ||
          !c.items[2].items.empty()) {
        fail_at(c, "declare-fun expects a nullary Real symbol");
      }
      declare(c.items[1], c.items[3]);
    } else if (name == "declare-const") {
      if (c.items.size() != 3 || !c.items[1].is_atom) fail_at(c, "malformed declare-const");
      declare(c.items[1], c.items[2]);
    } else if (name == "assert") {
      if (c.items.size() != 2) fail_at(c, "assert expects one formula");
      formula(c.items[1], false);
    } else if (name == "check-sat") {
      // nothing to do
    } else if (name == "exit") {
      done_ = true;
    } else {
      fail_at(c.items[0], "unsupported command " + name);
    }
  }

  void declare(const SExpr& sym, const SExpr& sort) {
    if (!sort.is_atom || sort.text != "Real") fail_at(sort, "only sort Real is supported");
    if (index_.count(sym.text)) fail_at(sym, "variable " + sym.text + " declared twice");
    if (rel_of(sym.text) || unary_fns().count(sym.text) || binary_fns().count(sym.text) ||
        enclose_literal(sym.text)) {
      fail_at(sym, "reserved symbol " + sym.text);
    }
    index_.emplace(sym.text, vars_.size());
    vars_.push_back({sym.text, std::nullopt, std::nullopt, sym.line, sym.column});
  }

  void formula(const SExpr& f, bool negated) {
    if (f.is_atom) {
      if (f.text == "true" && !negated) return;
      fail_at(f, "unsupported formula " + f.text);
    }
    if (f.items.empty() || !f.items[0].is_atom) fail_at(f, "malformed formula");
    const std::string& head = f.items[0].text;
    if (head == "and") {
      if (negated) fail_at(f, "negated conjunctions are not supported");
      for (std::size_t i = 1; i < f.items.size(); ++i) formula(f.items[i], false);
      return;
    }
    if (head == "not") {
      if (f.items.size() != 2) fail_at(f, "not expects one argument");
      formula(f.items[1], !negated);
      return;
    }
    auto rel = rel_of(head);
    if (!rel) fail_at(f.items[0], "unknown symbol " + head);
    if (f.items.size() < 3) fail_at(f, "arity mismatch for " + head);
    if (*rel == Rel::ne && f.items.size() != 3) fail_at(f, "distinct expects two arguments");
    if (negated && f.items.size() != 3) fail_at(f, "negated chains are not supported");
    Rel r = negated ? negate(*rel) : *rel;
    for (std::size_t i = 1; i + 1 < f.items.size(); ++i) {
      relation(r, f.items[i], f.items[i + 1]);
    }
  }

  std::optional<VarId> as_var(const SExpr& e) const {
    if (!e.is_atom) return std::nullopt;
    auto it = index_.find(e.text);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Literal enclosure, allowing (- c).
  static std::optional<Interval> bound_literal(const SExpr& e) {
    if (e.is_atom) return enclose_literal(e.text);
    if (head_is(e, "-") && e.items.size() == 2 && e.items[1].is_atom) {
      if (auto v = enclose_literal(e.items[1].text)) return -*v;
    }
    return std::nullopt;
  }

  static std::optional<double> infinite_token(const SExpr& e) {
    if (e.is_atom) {
      if (e.text == "inf" || e.text == "+inf") return INFINITY;
      if (e.text == "-inf") return -INFINITY;
    }
    if (head_is(e, "-") && e.items.size() == 2 && e.items[1].is_atom &&
        (e.items[1].text == "inf" || e.items[1].text == "+inf")) {
      return -INFINITY;
    }
    return std::nullopt;
  }

  // v >= value (lower) or v <= value (upper); value may be infinite.
  bool try_bound(const SExpr& var_side, const SExpr& lit_side, bool upper) {
    auto v = as_var(var_side);
    if (!v) return false;
    double value;
    if (auto inf = infinite_token(lit_side)) {
      value = *inf;
    } else {
      auto enc = bound_literal(lit_side);
      if (!enc) return false;
      value = upper ? enc->hi() : enc->lo();
    }
    auto& pv = vars_[*v];
    if (upper) {
      pv.hi = pv.hi ? std::min(*pv.hi, value) : value;
    } else {
      pv.lo = pv.lo ? std::max(*pv.lo, value) : value;
    }
    return true;
  }

  void relation(Rel r, const SExpr& a, const SExpr& b) {
    if (r == Rel::le) {
      if (try_bound(a, b, true) || try_bound(b, a, false)) return;
    } else if (r == Rel::ge) {
      if (try_bound(a, b, false) || try_bound(b, a, true)) return;
    }
    Term lhs = term(a);
    if (b.is_atom && b.text == "0") {
      atoms_.push_back({lhs, r});
      return;
    }
    atoms_.push_back({Term::apply(Fn::sub, {lhs, term(b)}), r});
  }

  static int integer_exponent(const SExpr& e) {
    std::string text = e.text;
    if (head_is(e, "-") && e.items.size() == 2 && e.items[1].is_atom) text = "-" + e.items[1].text;
    else if (!e.is_atom) fail_at(e, "exponent must be an integer literal");
    std::size_t i = (!text.empty() && (text[0] == '-' || text[0] == '+')) ? 1 : 0;
    if (i >= text.size() || text.size() - i > 6) fail_at(e, "exponent must be a small integer literal");
    for (std::size_t k = i; k < text.size(); ++k) {
      if (text[k] < '0' || text[k] > '9') fail_at(e, "exponent must be an integer literal");
    }
    return std::stoi(text);
  }

  Term term(const SExpr& e) {
    if (e.is_atom) {
      if (auto v = as_var(e)) return Term::variable(*v);
      if (auto c = enclose_literal(e.text)) return Term::constant(*c, e.text);
      if (infinite_token(e)) fail_at(e, "infinite constants are only allowed in bounds");
      bool symbolic = !e.text.empty() && (std::isalpha(static_cast<unsigned char>(e.text[0])) ||
                                          e.text[0] == '_');
      if (symbolic) fail_at(e, "undeclared variable " + e.text);
      fail_at(e, "unknown symbol " + e.text);
    }
    if (e.items.empty() || !e.items[0].is_atom) fail_at(e, "malformed term");
    const std::string& head = e.items[0].text;
    const std::size_t n = e.items.size() - 1;
    auto arity = [&](bool ok) {
      if (!ok) fail_at(e, "arity mismatch for " + head);
    };
    auto fold = [&](Fn fn) {
      Term acc = term(e.items[1]);
      for (std::size_t i = 2; i <= n; ++i) acc = Term::apply(fn, {acc, term(e.items[i])});
      return acc;
    };
    if (head == "+") {
      arity(n >= 2);
      return fold(Fn::add);
    }
    if (head == "*") {
      arity(n >= 2);
      return fold(Fn::mul);
    }
    if (head == "/") {
      arity(n >= 2);
      return fold(Fn::div);
    }
    if (head == "-") {
      arity(n >= 1);
      if (n == 1) return Term::apply(Fn::neg, {term(e.items[1])});
      return fold(Fn::sub);
    }
    if (head == "^") {
      arity(n == 2);
      return Term::apply(Fn::pow_int, {term(e.items[1])}, integer_exponent(e.items[2]));
    }
    if (auto it = unary_fns().find(head); it != unary_fns().end()) {
      arity(n == 1);
      return Term::apply(it->second, {term(e.items[1])});
    }
    if (auto it = binary_fns().find(head); it != binary_fns().end()) {
      arity(n == 2);
      return Term::apply(it->second, {term(e.items[1]), term(e.items[2])});
    }
    fail_at(e.items[0], "unknown symbol " + head);
  }
};

}  // namespace

System parse_system(std::string_view text) {
  Builder b;
  b.run(text);
  std::size_t lines = 1;
  for (char c : text) lines += c == '\n';
  try {
    return b.finish(lines);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), lines, 1);
  }
}

}  // namespace dproof
