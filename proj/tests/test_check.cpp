#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "dproof/check.hpp"
#include "dproof/trace.hpp"
#include "support/oracle.hpp"

using namespace dproof;

namespace {

const char* kExample1 = R"(
(declare-fun x () Real)
(declare-fun y () Real)
(assert (<= 1.5 x))
(assert (<= x 2))
(assert (<= 1 y))
(assert (<= y 2))
(assert (= y x))
(assert (= y (^ x 2)))
)";

const char* kDependency = R"(
(declare-fun x () Real)
(assert (<= 0 x))
(assert (<= x 1))
(assert (>= (- x x) 0.1))
)";

Term var(VarId i) { return Term::variable(i); }
Term lit(double v) { return Term::constant(Interval::point(v)); }
Term app(Fn f, std::vector<Term> a, int e = 0) { return Term::apply(f, std::move(a), e); }

Interval dec(const char* s) { return *enclose_literal(s); }

std::int64_t ulps(double a, double b) {
  std::int64_t n = 0;
  while (a < b && n < 1000) {
    a = std::nextafter(a, INFINITY);
    ++n;
  }
  return n;
}

Trace single_refutation(const System& s, VarId v) {
  Trace t(s);
  t.steps = {PruneStep{v, s.initial_box()[v], Interval::empty()}, FailStep{}};
  return t;
}

}  // namespace

TEST_CASE("interval axioms") {
  CHECK(check_ia({0, Interval(1.5, 2), Interval(1.5, 1.7), Interval(1.7, 2)}));
  CHECK_FALSE(check_ia({0, Interval(0, 3), Interval(0, 1), Interval(2, 3)}));
  CHECK(check_ia({0, Interval(1, 2), Interval(1, 2), Interval::empty()}));
}

TEST_CASE("taylor_bound examples") {
  Term f = app(Fn::add, {app(Fn::pow_int, {var(0)}, 2), app(Fn::pow_int, {var(1)}, 2)});
  Box d({Interval(0, 1), Interval(0, 1)});
  std::vector<double> a = {0, 0};
  Interval j = taylor_bound(f, d, a);
  CHECK(j.lo() <= 0);
  CHECK(j.hi() >= 4);
  CHECK(ulps(j.lo(), 0) <= 4);
  CHECK(ulps(4, j.hi()) <= 4);

  Term xx = app(Fn::sub, {var(0), var(0)});
  Box u({Interval(0, 1)});
  std::vector<double> mid = {0.5};
  Interval z = taylor_bound(xx, u, mid);
  CHECK(z.contains_zero());
  CHECK(width(z) <= 1e-15);
  CHECK(eval_natural(xx, u) == Interval(-1, 1));

  std::vector<double> c0 = {0.3};
  CHECK(taylor_bound(lit(5), u, c0) == Interval::point(5));

  std::vector<double> out = {2.0};
  CHECK_THROWS_AS(taylor_bound(xx, u, out), std::invalid_argument);
  CHECK_THROWS_AS(taylor_bound(app(Fn::abs, {var(0)}), u, mid), NonDifferentiable);
  Box neg({Interval(-1, 1)});
  std::vector<double> zero = {0.0};
  CHECK_THROWS_AS(taylor_bound(app(Fn::sqrt, {var(0)}), neg, zero), NonDifferentiable);
}

TEST_CASE("taylor_bound encloses the range") {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int k = 0; k < 40; ++k) {
    std::size_t n = 1 + k % 3;
    oracle::TermGen g(n, 100 + k);
    Term f = g.gen(3);
    Box d = oracle::random_box(n, rng, 2.0);
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = (rng() & 1) ? d[i].hi() : d[i].lo();
    Interval j;
    try {
      j = taylor_bound(f, d, a);
    } catch (const NonDifferentiable&) {
      continue;
    }
    ++checked;
    for (int s = 0; s < 10000; ++s) {
      auto x = oracle::sample(d, rng);
      long double v = oracle::eval(f, x);
      if (!std::isfinite(static_cast<double>(v))) continue;
      REQUIRE(v >= static_cast<long double>(j.lo()) - 1e-12L * (1 + std::fabs(static_cast<double>(v))));
      REQUIRE(v <= static_cast<long double>(j.hi()) + 1e-12L * (1 + std::fabs(static_cast<double>(v))));
    }
  }
  CHECK(checked >= 30);
}

TEST_CASE("taylor enclosure of the checker is sound") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 30; ++k) {
    std::size_t n = 1 + k % 4;
    oracle::TermGen g(n, 300 + k);
    std::vector<Variable> vars;
    Box d = oracle::random_box(n, rng, 2.0);
    for (std::size_t i = 0; i < n; ++i) vars.push_back({"v" + std::to_string(i), d[i]});
    System s(vars, {Atom{g.gen(3), Rel::ge}});
    ConstraintChecker cc(s);
    auto j = cc.taylor_enclosure(0, d);
    if (!j) continue;
    for (int t = 0; t < 10000; ++t) {
      auto x = oracle::sample(d, rng);
      long double v = oracle::eval(s.atoms()[0].term, x);
      double tol = 1e-12 * (1 + std::fabs(static_cast<double>(v)));
      REQUIRE(v >= j->lo() - tol);
      REQUIRE(v <= j->hi() + tol);
    }
  }
}

TEST_CASE("refined_delta") {
  Box b({Interval(0, 1), Interval(0, 0.25)});
  CHECK(refined_delta(1e-3, b) == 1e-3);
  CHECK(refined_delta(1.0, b) == 0.25);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 1000; ++k) {
    Box r = oracle::random_box(3, rng);
    double d = std::ldexp(1.0, -static_cast<int>(rng() % 20));
    double e = refined_delta(d, r);
    CHECK(e <= d);
    CHECK(e * 4 <= r.max_width());
    CHECK(e > 0);
  }
}

TEST_CASE("constraint axioms") {
  System ex = parse_system(kExample1);
  ConstraintChecker cc(ex);
  Box upper({Interval(dec("1.7").lo(), 2), Interval(1, 2)});
  CaOutcome o = cc.check_ca(upper, 1e-3);
  CHECK(o.kind == CaOutcome::Kind::valid);
  CHECK(o.method == Method::natural);

  CHECK(cc.check_ca(upper.with(0, Interval::empty()), 1e-3).method == Method::empty_box);

  Box near_one({Interval(0.9, 1.1), Interval(0.9, 1.1)});
  CaOutcome bad = cc.check_ca(near_one, 1e-3);
  CHECK(bad.kind == CaOutcome::Kind::invalid_hint);
  REQUIRE(bad.witness.size() == 2);
  CHECK(bad.witness[0] == bad.witness[1]);
  CHECK(satisfied_at(ex.atoms(), bad.witness));

  System dep = parse_system(kDependency);
  ConstraintChecker with_taylor(dep);
  CaOutcome t = with_taylor.check_ca(dep.initial_box(), 1e-3);
  CHECK(t.kind == CaOutcome::Kind::valid);
  CHECK(t.method == Method::taylor);

  ConstraintChecker natural_only(dep, {.use_taylor = false});
  CaOutcome sp = natural_only.check_ca(dep.initial_box(), 1e-3);
  REQUIRE(sp.kind == CaOutcome::Kind::split);
  REQUIRE(sp.children.size() == 2);
  CHECK(sp.children[0].box[0].hi() == 0.5);
  CHECK(sp.children[1].box[0].lo() == 0.5);
  CHECK(sp.children[0].delta == 1e-3);

  // A point box that cannot be refuted or split.
  System sat = parse_system(
      "(declare-fun x () Real)(assert (<= 0 x))(assert (<= x 1))(assert (>= (* x x) 0.25))");
  ConstraintChecker sc(sat);
  Box p({Interval::point(dec("0.5").lo())});
  CaOutcome u = sc.check_ca(p, 1e-3);
  CHECK((u.kind == CaOutcome::Kind::unsplittable || u.kind == CaOutcome::Kind::invalid_hint));
}

TEST_CASE("check_tree on the hand-written run") {
  System s = parse_system(kExample1);
  Trace t(s);
  t.steps = {
      BranchStep{0, Interval(dec("1.7").lo(), 2), Interval(1.5, dec("1.7").lo())},
      BacktrackStep{0, Interval(dec("1.7").lo(), 2), Interval(1.5, dec("1.7").lo())},
      PruneStep{0, Interval(dec("1.6").lo(), dec("1.7").lo()), Interval(1.5, dec("1.6").lo())},
      PruneStep{0, Interval(1.5, dec("1.6").lo()), Interval::empty()},
      FailStep{},
  };
  CheckReport r = check_tree(build_tree(t), 1e-3);
  CHECK(r.verdict == CheckReport::Verdict::valid);
  CHECK(r.subproblems.empty());
  CHECK(r.stats.axioms == 7);
  CHECK(r.stats.interval_axioms == 3);
  CHECK(r.stats.constraint_axioms == 4);
  std::string text = format_report(r);
  CHECK(text.substr(text.rfind('\n', text.size() - 2) + 1) == "valid, 7 axioms\n");
  CHECK(r.lines.size() == 7);
}

TEST_CASE("check_tree refinement and failures") {
  SUBCASE("needs refinement") {
    System dep = parse_system(kDependency);
    CheckReport r = check_tree(build_tree(single_refutation(dep, 0)), 1e-3, {.use_taylor = false});
    CHECK(r.verdict == CheckReport::Verdict::needs_refinement);
    CHECK(r.subproblems.size() == 2);
    CHECK(format_report(r).find("needs-refinement, 2 subproblems, 3 axioms") != std::string::npos);

    CheckReport ok = check_tree(build_tree(single_refutation(dep, 0)), 1e-3);
    CHECK(ok.verdict == CheckReport::Verdict::valid);
  }
  SUBCASE("gap in an interval axiom") {
    System s = parse_system(
        "(declare-fun x () Real)(assert (<= 0 x))(assert (<= x 3))(assert (>= (* x 0) 1))");
    Trace t(s);
    t.steps = {PruneStep{0, Interval(0, 1), Interval(2, 3)},
               PruneStep{0, Interval(2, 3), Interval::empty()}, FailStep{}};
    ProofTree p = build_tree(t);
    CheckReport r = check_tree(p, 1e-3);
    CHECK(r.verdict == CheckReport::Verdict::malformed);
    REQUIRE(r.node.has_value());
    CHECK(p.nodes[*r.node].rule == Rule::interval_axiom);
    auto ia = interval_axiom_of(p.nodes[*r.node].label);
    CHECK(ia->whole == Interval(0, 3));
  }
  SUBCASE("satisfiable system") {
    System s = parse_system(
        "(declare-fun x () Real)(assert (<= -2 x))(assert (<= x 2))(assert (<= (* x x) 1))"
        "(assert (>= x 0))");
    CheckReport r = check_tree(build_tree(single_refutation(s, 0)), 1e-3);
    CHECK(r.verdict == CheckReport::Verdict::counterexample);
    CHECK(satisfied_at(s.atoms(), r.witness));
  }
  SUBCASE("rule damage") {
    System dep = parse_system(kDependency);
    ProofTree p = build_tree(single_refutation(dep, 0));
    p.nodes[p.nodes[p.root].left.value()].rule = Rule::forall_mp;
    CheckReport r = check_tree(p, 1e-3);
    CHECK(r.verdict == CheckReport::Verdict::malformed);
    CHECK(format_report(r).rfind("malformed at node", 0) == 0);
  }
}
