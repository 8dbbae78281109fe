#include "dproof/check.hpp"

#include <cmath>
#include <stdexcept>

#include "rounding.hpp"

namespace dproof {

bool check_ia(const IntervalAxiom& a) { return covers_union(a.whole, a.part1, a.part2); }

namespace {

bool mentions(const Term& t, VarId v) {
  if (t.kind() == Term::Kind::variable) return t.var() == v;
  for (const auto& a : t.args()) {
    if (mentions(a, v)) return true;
  }
  return false;
}

Box point_box(std::span<const double> p) {
  std::vector<Interval> dims;
  dims.reserve(p.size());
  for (double v : p) dims.push_back(Interval::point(v));
  return Box(std::move(dims));
}

bool bounded(const Box& b) {
  for (const auto& d : b.dims()) {
    if (!d.is_bounded()) return false;
  }
  return true;
}

// Offset interval d - a, outward rounded.
Interval offset(const Interval& d, double a) { return d - Interval::point(a); }

// Fixed corner pattern: all corners for small n, otherwise eight masks.
std::vector<std::vector<bool>> corner_masks(std::size_t n, std::size_t all_up_to) {
  std::vector<std::vector<bool>> out;
  if (n <= all_up_to) {
    for (std::size_t m = 0; m < (std::size_t{1} << n); ++m) {
      std::vector<bool> c(n);
      for (std::size_t i = 0; i < n; ++i) c[i] = (m >> i) & 1;
      out.push_back(std::move(c));
    }
    return out;
  }
  auto make = [&](auto pred) {
    std::vector<bool> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = pred(i);
    return c;
  };
  out.push_back(make([](std::size_t) { return false; }));
  out.push_back(make([](std::size_t) { return true; }));
  out.push_back(make([](std::size_t i) { return i % 2 == 1; }));
  out.push_back(make([](std::size_t i) { return i % 2 == 0; }));
  out.push_back(make([&](std::size_t i) { return i >= n / 2; }));
  out.push_back(make([&](std::size_t i) { return i < n / 2; }));
  out.push_back(make([](std::size_t i) { return i % 3 == 0; }));
  out.push_back(make([](std::size_t i) { return i % 3 != 0; }));
  return out;
}

std::vector<double> corner(const Box& b, const std::vector<bool>& mask) {
  std::vector<double> p(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) p[i] = mask[i] ? b[i].hi() : b[i].lo();
  return p;
}

double radical_inverse(std::size_t k, std::size_t base) {
  double inv = 1.0 / static_cast<double>(base), f = inv, r = 0.0;
  while (k > 0) {
    r += f * static_cast<double>(k % base);
    k /= base;
    f *= inv;
  }
  return r;
}

// A finite point of d for probing: interior when possible.
double probe(const Interval& d, double t) {
  if (!d.is_bounded()) return d.mid();
  double p = d.lo() + t * (d.hi() - d.lo());
  if (!(p >= d.lo())) p = d.lo();
  if (p > d.hi()) p = d.hi();
  return p;
}

constexpr std::size_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

}  // namespace

Interval taylor_bound(const Term& f, const Box& d, std::span<const double> center,
                      DeriveOptions options) {
  if (center.size() != d.size()) throw std::invalid_argument("center dimension mismatch");
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!std::isfinite(center[i]) || !d[i].contains(center[i])) {
      throw std::invalid_argument("center outside the box");
    }
  }
  bool regular = true;
  eval_natural(f, d, regular);
  if (!regular) throw NonDifferentiable("term is not differentiable on the box");
  Interval sum = eval_natural(f, point_box(center));
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!mentions(f, i)) continue;
    Interval g = eval_natural(derive(f, i, options), d);
    sum = sum + g * offset(d[i], center[i]);
  }
  return sum;
}

double refined_delta(double delta, const Box& b) {
  double w = 0.0;
  for (const auto& d : b.dims()) {
    if (d.is_empty()) continue;
    w = std::max(w, std::isinf(d.lo()) || std::isinf(d.hi())
                        ? rounding::kInf
                        : rounding::sub_down(d.hi(), d.lo()));
  }
  double quarter = std::isinf(w) ? w : w * 0.25;
  // Below the normal range the scaling may round; step down to stay below.
  if (quarter * 4 > w) quarter = rounding::next_down(quarter);
  return std::min(delta, quarter);
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::empty_box: return "empty";
    case Method::natural: return "natural";
    case Method::taylor: return "taylor";
  }
  return "?";
}

ConstraintChecker::ConstraintChecker(const System& s, CheckerConfig config)
    : system_(s), config_(config) {
  DeriveOptions opt{config.subgradient_envelope};
  for (const auto& atom : system_.atoms()) {
    try {
      std::vector<Term> grad;
      for (VarId i = 0; i < system_.size(); ++i) grad.push_back(derive(atom.term, i, opt));
      gradient_.push_back(std::move(grad));
    } catch (const NonDifferentiable&) {
      gradient_.push_back(std::nullopt);
    }
  }
}

std::optional<Interval> ConstraintChecker::taylor_enclosure(std::size_t k, const Box& b) const {
  if (!gradient_.at(k) || !bounded(b)) return std::nullopt;
  const Term& f = system_.atoms()[k].term;
  bool regular = true;
  Interval result = eval_natural(f, b, regular);
  if (!regular) return std::nullopt;
  const auto& grad = *gradient_[k];
  std::vector<Interval> g(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) g[i] = eval_natural(grad[i], b);
  for (const auto& mask : corner_masks(b.size(), 3)) {
    std::vector<double> a = corner(b, mask);
    Interval sum = eval_natural(f, point_box(a));
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (b[i].is_point()) continue;
      sum = sum + g[i] * offset(b[i], a[i]);
    }
    result = intersect(result, sum);
    if (result.is_empty()) break;
  }
  return result;
}

std::optional<ConstraintChecker::Refutation> ConstraintChecker::refute_by(
    const Box& b, bool natural_only, std::size_t* taylor_calls) const {
  if (b.is_empty()) return Refutation{Method::empty_box, 0};
  const auto& atoms = system_.atoms();
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (atom_false_on(atoms[k], b)) return Refutation{Method::natural, k};
  }
  if (natural_only || !config_.use_taylor) return std::nullopt;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (taylor_calls) ++*taylor_calls;
    auto j = taylor_enclosure(k, b);
    if (j && certifies_false(atoms[k].rel, *j)) return Refutation{Method::taylor, k};
  }
  return std::nullopt;
}

std::optional<Method> ConstraintChecker::refute(const Box& b, std::size_t* taylor_calls) const {
  if (auto r = refute_by(b, false, taylor_calls)) return r->method;
  return std::nullopt;
}

std::optional<std::vector<double>> ConstraintChecker::find_counterexample(const Box& b) const {
  if (b.is_empty()) return std::nullopt;
  const auto& atoms = system_.atoms();
  auto try_point = [&](const std::vector<double>& p) { return satisfied_at(atoms, p); };

  std::vector<double> mid = b.midpoint();
  if (try_point(mid)) return mid;
  for (const auto& mask : corner_masks(b.size(), 6)) {
    std::vector<double> p(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) p[i] = probe(b[i], mask[i] ? 1.0 : 0.0);
    if (try_point(p)) return p;
  }
  for (std::size_t k = 1; k <= 32; ++k) {
    std::vector<double> p(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
      p[i] = probe(b[i], radical_inverse(k, kPrimes[i % std::size(kPrimes)]));
    }
    if (try_point(p)) return p;
  }
  return std::nullopt;
}

CaOutcome ConstraintChecker::check_ca(const Box& b, double delta) const {
  CaOutcome out;
  if (auto m = refute(b, &out.taylor_calls)) {
    out.kind = CaOutcome::Kind::valid;
    out.method = *m;
    return out;
  }
  if (auto w = find_counterexample(b)) {
    out.kind = CaOutcome::Kind::invalid_hint;
    out.witness = std::move(*w);
    return out;
  }
  // Split the widest splittable variable at its midpoint.
  std::optional<VarId> var;
  double best = -1;
  for (VarId i = 0; i < b.size(); ++i) {
    if (!b[i].split_point()) continue;
    double w = width(b[i]);
    if (w > best) {
      best = w;
      var = i;
    }
  }
  if (!var) {
    out.kind = CaOutcome::Kind::unsplittable;
    return out;
  }
  double m = *b[*var].split_point();
  Box left = b.with(*var, Interval(b[*var].lo(), m));
  Box right = b.with(*var, Interval(m, b[*var].hi()));
  out.kind = CaOutcome::Kind::split;
  out.children.push_back({left, refined_delta(delta, left)});
  out.children.push_back({right, refined_delta(delta, right)});
  return out;
}

std::string_view verdict_name(CheckReport::Verdict v) {
  switch (v) {
    case CheckReport::Verdict::valid: return "valid";
    case CheckReport::Verdict::needs_refinement: return "needs-refinement";
    case CheckReport::Verdict::counterexample: return "counterexample";
    case CheckReport::Verdict::malformed: return "malformed";
  }
  return "?";
}

CheckReport check_tree(const ProofTree& p, double delta, const CheckerConfig& config) {
  CheckReport r;
  auto malformed = [&](std::size_t node, std::string reason) {
    r.verdict = CheckReport::Verdict::malformed;
    r.node = node;
    r.reason = std::move(reason);
    r.subproblems.clear();
    return r;
  };
  if (auto bad = check_rules(p)) return malformed(bad->node, bad->reason);

  ConstraintChecker cc(p.system, config);
  const System& s = p.system;
  for (std::size_t id : p.leaves()) {
    const ProofNode& n = p.nodes[id];
    ++r.stats.axioms;
    if (n.rule == Rule::interval_axiom) {
      ++r.stats.interval_axioms;
      auto ia = interval_axiom_of(n.label);
      std::string text = "IA " + std::to_string(id) + " " + s.variables()[ia->var].name + " " +
                         format_interval(ia->whole) + " in " + format_interval(ia->part1) +
                         " or " + format_interval(ia->part2);
      if (!check_ia(*ia)) {
        r.lines.push_back(text + ": gap");
        return malformed(id, "interval axiom leaves a gap");
      }
      r.lines.push_back(text + ": valid");
      continue;
    }
    ++r.stats.constraint_axioms;
    const Box& box = *n.label.antecedent[0];
    std::string text = "CA " + std::to_string(id) + " " + format_box(box, s);
    CaOutcome o = cc.check_ca(box, delta);
    r.stats.taylor_calls += o.taylor_calls;
    switch (o.kind) {
      case CaOutcome::Kind::valid:
        r.lines.push_back(text + ": valid " + std::string(method_name(o.method)));
        break;
      case CaOutcome::Kind::split:
        ++r.stats.splits;
        for (const auto& c : o.children) {
          text += " | split delta " + format_hex(c.delta) + " " + format_box(c.box, s);
          r.subproblems.push_back(c);
        }
        r.lines.push_back(text);
        break;
      case CaOutcome::Kind::invalid_hint: {
        std::string point;
        for (std::size_t i = 0; i < o.witness.size(); ++i) {
          if (i) point += ' ';
          point += "(" + s.variables()[i].name + " " + format_hex(o.witness[i]) + ")";
        }
        r.lines.push_back(text + ": counterexample " + point);
        r.verdict = CheckReport::Verdict::counterexample;
        r.node = id;
        r.reason = point;
        r.witness = o.witness;
        r.subproblems.clear();
        return r;
      }
      case CaOutcome::Kind::unsplittable:
        r.lines.push_back(text + ": cannot split");
        return malformed(id, "constraint axiom cannot be refined further");
    }
  }
  r.verdict = r.subproblems.empty() ? CheckReport::Verdict::valid
                                    : CheckReport::Verdict::needs_refinement;
  return r;
}

std::string format_report(const CheckReport& r) {
  std::string out;
  for (const auto& l : r.lines) out += l + "\n";
  std::string axioms = std::to_string(r.stats.axioms) + " axioms";
  switch (r.verdict) {
    case CheckReport::Verdict::valid:
      out += "valid, " + axioms + "\n";
      break;
    case CheckReport::Verdict::needs_refinement:
      out += "needs-refinement, " + std::to_string(r.subproblems.size()) + " subproblems, " +
             axioms + "\n";
      break;
    case CheckReport::Verdict::counterexample:
      out += "counterexample at node " + std::to_string(r.node.value_or(0)) + ": " + r.reason + "\n";
      break;
    case CheckReport::Verdict::malformed:
      out += "malformed at node " + std::to_string(r.node.value_or(0)) + ": " + r.reason + "\n";
      break;
  }
  return out;
}

}  // namespace dproof
