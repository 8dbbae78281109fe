#include "dproof/icp.hpp"

#include <cmath>
#include <stdexcept>

#include "rounding.hpp"

namespace dproof {

void SolverConfig::validate() const {
  if (!(delta > 0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be positive");
  if (!(eps() > 0)) throw std::invalid_argument("epsilon must be positive");
  if (max_steps == 0) throw std::invalid_argument("max_steps must be positive");
  if (!(slack() >= 0)) throw std::invalid_argument("prune slack must be non-negative");
}

// ---- HC4 ----

namespace {

using rounding::kInf;

// Tight bounds on y^(1/n) for y >= 0, checked with interval powers.
double root_up(double y, int n) {
  if (y == 0 || std::isinf(y)) return y;
  double r = rounding::widen_up(std::pow(y, 1.0 / n));
  for (int k = 0; k < 64; ++k) {
    if (pow_int(Interval::point(r), n).lo() >= y) return r;
    r = rounding::next_up(r);
  }
  return kInf;
}

double root_down(double y, int n) {
  if (y == 0 || std::isinf(y)) return y;
  double r = rounding::widen_down(std::pow(y, 1.0 / n));
  for (int k = 0; k < 64; ++k) {
    if (r <= 0) return 0;
    if (pow_int(Interval::point(r), n).hi() <= y) return r;
    r = rounding::next_down(r);
  }
  return 0;
}

Interval nonneg(const Interval& v) { return intersect(v, Interval(0, kInf)); }

Interval even_root_preimage(const Interval& x, const Interval& p, int n) {
  Interval q = nonneg(p);
  if (q.is_empty()) return {};
  Interval r(root_down(q.lo(), n), root_up(q.hi(), n));
  Interval pos = intersect(x, r);
  Interval neg = intersect(x, -r);
  return hull(pos, neg);
}

double signed_root_down(double y, int n) { return y >= 0 ? root_down(y, n) : -root_up(-y, n); }
double signed_root_up(double y, int n) { return y >= 0 ? root_up(y, n) : -root_down(-y, n); }

Interval target_of(Rel rel) {
  switch (rel) {
    case Rel::eq: return Interval::point(0);
    case Rel::gt:
    case Rel::ge: return Interval(0, kInf);
    case Rel::lt:
    case Rel::le: return Interval(-kInf, 0);
    case Rel::ne: return Interval::entire();
  }
  return Interval::entire();
}

}  // namespace

Hc4::Hc4(const Term& t) { compile(t); }

int Hc4::compile(const Term& t) {
  Node n;
  n.kind = t.kind();
  if (t.kind() == Term::Kind::variable) {
    n.var = t.var();
  } else if (t.kind() == Term::Kind::constant) {
    n.value = t.value();
  } else {
    n.fn = t.fn();
    n.exponent = t.exponent();
    auto args = t.args();
    n.a = compile(args[0]);
    if (args.size() > 1) n.b = compile(args[1]);
  }
  nodes_.push_back(n);
  return static_cast<int>(nodes_.size()) - 1;
}

Box Hc4::contract(const Box& box, Rel rel) const {
  const std::size_t count = nodes_.size();
  std::vector<Interval> v(count);
  auto empty_box = [&]() { return box.with(0, Interval::empty()); };

  // Forward: enclosures of every subterm.
  for (std::size_t i = 0; i < count; ++i) {
    const Node& n = nodes_[i];
    if (n.kind == Term::Kind::variable) {
      v[i] = box[n.var];
    } else if (n.kind == Term::Kind::constant) {
      v[i] = n.value;
    } else {
      std::array<Interval, 2> args = {v[n.a], n.b >= 0 ? v[n.b] : Interval()};
      v[i] = iv_arith(n.fn, std::span<const Interval>(args.data(), n.b >= 0 ? 2 : 1), n.exponent);
    }
    if (v[i].is_empty()) return empty_box();
  }

  v[count - 1] = intersect(v[count - 1], target_of(rel));
  if (v[count - 1].is_empty()) return empty_box();

  // Backward: narrow children from parents, root first.
  for (std::size_t k = count; k-- > 0;) {
    const Node& n = nodes_[k];
    if (n.kind != Term::Kind::apply) continue;
    const Interval& p = v[k];
    Interval& a = v[n.a];
    switch (n.fn) {
      case Fn::add:
        a = intersect(a, p - v[n.b]);
        v[n.b] = intersect(v[n.b], p - a);
        break;
      case Fn::sub:
        a = intersect(a, p + v[n.b]);
        v[n.b] = intersect(v[n.b], a - p);
        break;
      case Fn::mul: {
        Interval& b = v[n.b];
        if (!(p.contains_zero() && b.contains_zero())) a = intersect(a, p / b);
        if (!(p.contains_zero() && a.contains_zero())) b = intersect(b, p / a);
        break;
      }
      case Fn::div: {
        Interval& b = v[n.b];
        a = intersect(a, p * b);
        if (!(p.contains_zero() && a.contains_zero())) b = intersect(b, a / p);
        break;
      }
      case Fn::neg: a = intersect(a, -p); break;
      case Fn::sqr: a = even_root_preimage(a, p, 2); break;
      case Fn::pow_int: {
        int e = n.exponent;
        if (e >= 2 && e % 2 == 0) {
          a = even_root_preimage(a, p, e);
        } else if (e >= 3) {
          a = intersect(a, Interval(signed_root_down(p.lo(), e), signed_root_up(p.hi(), e)));
        } else if (e == 1) {
          a = intersect(a, p);
        }
        break;
      }
      case Fn::sqrt: a = intersect(a, sqr(nonneg(p))); break;
      case Fn::exp: a = intersect(a, log(p)); break;
      case Fn::log: a = intersect(a, exp(p)); break;
      case Fn::asin: a = intersect(a, sin(p)); break;
      case Fn::acos: a = intersect(a, cos(p)); break;
      case Fn::atan: a = intersect(a, tan(intersect(p, Interval(-2, 2)))); break;
      case Fn::abs: {
        Interval q = nonneg(p);
        if (q.is_empty()) return empty_box();
        a = hull(intersect(a, q), intersect(a, -q));
        break;
      }
      case Fn::min:
        a = intersect(a, Interval(p.lo(), kInf));
        v[n.b] = intersect(v[n.b], Interval(p.lo(), kInf));
        break;
      case Fn::max:
        a = intersect(a, Interval(-kInf, p.hi()));
        v[n.b] = intersect(v[n.b], Interval(-kInf, p.hi()));
        break;
      default:
        break;
    }
    if (a.is_empty() || (n.b >= 0 && v[n.b].is_empty())) return empty_box();
  }

  std::vector<Interval> dims = box.dims();
  for (std::size_t i = 0; i < count; ++i) {
    if (nodes_[i].kind != Term::Kind::variable) continue;
    Interval& d = dims[nodes_[i].var];
    d = intersect(d, v[i]);
    if (d.is_empty()) return empty_box();
  }
  return Box(std::move(dims));
}

// ---- prune ----

namespace {

VarId first_var(const Atom& a) {
  auto vars = a.term.variables();
  return vars.empty() ? 0 : vars.front();
}

bool significant(double removed, const Interval& cur, double slack) {
  if (!(removed > 0)) return false;
  double w = width(cur);
  if (std::isinf(w)) return true;
  return removed > slack * w;
}

// Shaves the lower (or upper) slab of var down to `target`, backing off
// toward the current endpoint until the slab is certified.
bool shave(Box& box, VarId var, double target, bool lower, const ConstraintChecker& cc,
           std::vector<PruneStep>& out) {
  const Interval cur = box[var];
  double end = lower ? cur.lo() : cur.hi();
  double cuts[4];
  if (std::isinf(end)) {
    cuts[0] = cuts[1] = cuts[2] = cuts[3] = target;
  } else {
    double g = lower ? target - end : end - target;
    double sign = lower ? -1.0 : 1.0;
    cuts[0] = target;
    cuts[1] = target + sign * g / 1024;
    cuts[2] = target + sign * g / 16;
    cuts[3] = target + sign * g / 2;
  }
  for (double c : cuts) {
    if (lower ? !(c > cur.lo() && c <= cur.hi()) : !(c < cur.hi() && c >= cur.lo())) continue;
    Interval removed = lower ? Interval(cur.lo(), c) : Interval(c, cur.hi());
    Interval kept = lower ? Interval(c, cur.hi()) : Interval(cur.lo(), c);
    if (!cc.refute(box.with(var, removed))) continue;
    out.push_back({var, removed, kept});
    box = box.with(var, kept);
    return true;
  }
  return false;
}

}  // namespace

namespace {

PruneResult prune_with(const Box& b, std::size_t atom, const Hc4& hc4, const ConstraintChecker& cc,
                       double slack) {
  PruneResult r{b, {}};
  if (b.is_empty()) return r;
  const Atom& a = cc.system().atoms().at(atom);
  if (a.rel == Rel::ne) return r;
  Box c = hc4.contract(b, a.rel);
  if (c.is_empty()) {
    if (cc.refute(b)) {
      VarId v = first_var(a);
      r.steps.push_back({v, b[v], Interval::empty()});
      r.kept = b.with(v, Interval::empty());
    }
    return r;
  }
  for (VarId i = 0; i < b.size(); ++i) {
    const Interval now = r.kept[i];
    if (c[i].lo() > now.lo() && significant(c[i].lo() - now.lo(), now, slack)) {
      shave(r.kept, i, c[i].lo(), true, cc, r.steps);
    }
    const Interval mid = r.kept[i];
    if (c[i].hi() < mid.hi() && significant(mid.hi() - c[i].hi(), mid, slack)) {
      shave(r.kept, i, c[i].hi(), false, cc, r.steps);
    }
  }
  return r;
}

}  // namespace

PruneResult prune(const Box& b, std::size_t atom, const ConstraintChecker& cc,
                  const SolverConfig& cfg) {
  Hc4 hc4(cc.system().atoms().at(atom).term);
  return prune_with(b, atom, hc4, cc, cfg.slack());
}

// ---- branch ----

BranchResult branch(const Box& b, const SolverConfig& cfg, std::size_t* cursor) {
  const double eps = cfg.eps();
  std::optional<VarId> var;
  auto splittable = [&](VarId i) { return width(b[i]) >= eps && b[i].split_point(); };
  if (cfg.branch_rule == BranchRule::round_robin && cursor) {
    for (std::size_t k = 0; k < b.size(); ++k) {
      VarId i = (*cursor + k) % b.size();
      if (splittable(i)) {
        var = i;
        *cursor = i + 1;
        break;
      }
    }
  } else {
    double best = -1;
    for (VarId i = 0; i < b.size(); ++i) {
      if (!splittable(i)) continue;
      double w = width(b[i]);
      if (w > best) {
        best = w;
        var = i;
      }
    }
  }
  if (!var) throw std::domain_error("no variable wide enough to branch on");
  double m = *b[*var].split_point();
  return {b.with(*var, Interval(b[*var].lo(), m)), b.with(*var, Interval(m, b[*var].hi())), *var};
}

bool delta_consistent(const System& s, const Box& b, double delta) {
  for (const auto& a : s.atoms()) {
    if (a.rel == Rel::ne) continue;
    Interval v = eval_natural(a.term, b);
    if (certifies_true(a.rel, v)) continue;
    if (v.is_empty() || !(width(v) < delta)) return false;
  }
  return true;
}

// ---- solve ----

namespace {

class Solver {
 public:
  Solver(const System& s, const SolverConfig& cfg)
      : cfg_(cfg), cc_(s, CheckerConfig{cfg.use_taylor}), trace_(s), box_(s.initial_box()) {
    for (const auto& a : s.atoms()) hc4_.emplace_back(a.term);
  }

  Trace run() {
    const System& s = trace_.system;
    std::size_t iteration = 0;
    for (;;) {
      if (trace_.steps.size() >= cfg_.max_steps) return finish(Verdict::timeout);
      if (cfg_.deadline && (++iteration & 63) == 0 &&
          std::chrono::steady_clock::now() > *cfg_.deadline) {
        return finish(Verdict::timeout);
      }
      if (!box_.is_empty()) {
        if (!refute_whole(true)) {
          fixpoint();
          if (!box_.is_empty()) refute_whole(false);
        }
      }
      if (box_.is_empty()) {
        if (stack_.empty()) {
          trace_.steps.push_back(FailStep{});
          return finish(Verdict::unsat);
        }
        Pending p = std::move(stack_.back());
        stack_.pop_back();
        trace_.steps.push_back(BacktrackStep{p.var, p.taken, p.sibling});
        box_ = p.saved.with(p.var, p.sibling);
        continue;
      }
      if (delta_consistent(s, box_, cfg_.delta)) return finish(Verdict::delta_sat);
      BranchResult br;
      try {
        br = branch(box_, cfg_, &cursor_);
      } catch (const std::domain_error&) {
        return finish(Verdict::delta_sat);
      }
      stack_.push_back({br.var, br.left[br.var], br.right[br.var], box_});
      trace_.steps.push_back(BranchStep{br.var, br.left[br.var], br.right[br.var]});
      box_ = br.left;
    }
  }

 private:
  struct Pending {
    VarId var;
    Interval taken;
    Interval sibling;
    Box saved;
  };

  SolverConfig cfg_;
  ConstraintChecker cc_;
  std::vector<Hc4> hc4_;
  Trace trace_;
  Box box_;
  std::vector<Pending> stack_;
  std::size_t cursor_ = 0;

  Trace finish(Verdict v) {
    trace_.verdict = v;
    if (v == Verdict::delta_sat) trace_.witness = box_;
    return std::move(trace_);
  }

  bool refute_whole(bool natural_only) {
    auto r = cc_.refute_by(box_, natural_only);
    if (!r) return false;
    VarId v = first_var(trace_.system.atoms()[r->atom]);
    trace_.steps.push_back(PruneStep{v, box_[v], Interval::empty()});
    box_ = box_.with(v, Interval::empty());
    return true;
  }

  void fixpoint() {
    const std::size_t m = trace_.system.atoms().size();
    for (int pass = 0; pass < 64; ++pass) {
      bool changed = false;
      for (std::size_t k = 0; k < m && !box_.is_empty(); ++k) {
        PruneResult r = prune_with(box_, k, hc4_[k], cc_, cfg_.slack());
        if (r.steps.empty()) continue;
        for (auto& st : r.steps) trace_.steps.push_back(st);
        box_ = std::move(r.kept);
        changed = true;
      }
      if (!changed || box_.is_empty()) break;
    }
  }
};

}  // namespace

Trace solve(const System& s, const SolverConfig& cfg) {
  cfg.validate();
  return Solver(s, cfg).run();
}

}  // namespace dproof
