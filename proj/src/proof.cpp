#include "dproof/proof.hpp"

#include <algorithm>

namespace dproof {

bool same_boxes(const std::vector<BoxRef>& a, const std::vector<BoxRef>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i] && !(*a[i] == *b[i])) return false;
  }
  return true;
}

bool operator==(const Formula& a, const Formula& b) {
  return a.kind == b.kind && same_boxes(a.antecedent, b.antecedent) &&
         same_boxes(a.consequent, b.consequent);
}

std::string_view rule_name(Rule r) {
  switch (r) {
    case Rule::or_intro: return "or-intro";
    case Rule::forall_mp: return "forall-mp";
    case Rule::interval_axiom: return "IA";
    case Rule::constraint_axiom: return "CA";
  }
  return "?";
}

std::vector<std::size_t> ProofTree::leaves() const {
  std::vector<std::size_t> out;
  if (nodes.empty()) return out;
  std::vector<std::size_t> stack = {root};
  while (!stack.empty()) {
    std::size_t id = stack.back();
    stack.pop_back();
    const ProofNode& n = nodes.at(id);
    if (n.is_leaf()) {
      out.push_back(id);
      continue;
    }
    if (n.right) stack.push_back(*n.right);
    if (n.left) stack.push_back(*n.left);
  }
  return out;
}

std::optional<IntervalAxiom> interval_axiom_of(const Formula& f) {
  if (f.kind != Formula::Kind::covers || f.antecedent.size() != 1 || f.consequent.size() != 2) {
    return std::nullopt;
  }
  const Box& w = *f.antecedent[0];
  const Box& a = *f.consequent[0];
  const Box& b = *f.consequent[1];
  if (w.size() != a.size() || w.size() != b.size() || w.size() == 0) return std::nullopt;
  std::optional<VarId> var;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == a[i] && w[i] == b[i]) continue;
    if (var) return std::nullopt;  // differs in two places
    var = i;
  }
  // Trivial covers (all equal) are read as an axiom on the first variable.
  VarId v = var.value_or(0);
  return IntervalAxiom{v, w[v], a[v], b[v]};
}

namespace {

struct Builder {
  ProofTree tree;
  std::size_t current = 0;
  std::vector<std::size_t> pending;

  explicit Builder(const Trace& t) : tree(t.system) {
    tree.nodes.push_back({refutes(std::make_shared<const Box>(t.initial_box)), Rule::constraint_axiom,
                          std::nullopt, std::nullopt});
  }

  static Formula refutes(BoxRef b) { return {Formula::Kind::refutes, {std::move(b)}, {}}; }

  std::size_t add(Formula f, Rule r) {
    tree.nodes.push_back({std::move(f), r, std::nullopt, std::nullopt});
    return tree.nodes.size() - 1;
  }

  const BoxRef& current_box() const { return tree.nodes[current].label.antecedent[0]; }

  // Expands the current leaf I -> not c into
  //   forall-mp( or-intro(first -> not c, second -> not c), IA(I -> first or second) )
  // and returns the ids of the two new refutation leaves.
  std::pair<std::size_t, std::size_t> split(VarId var, const Interval& first, const Interval& second) {
    BoxRef whole = current_box();
    auto b1 = std::make_shared<const Box>(whole->with(var, first));
    auto b2 = std::make_shared<const Box>(whole->with(var, second));

    Formula disj{Formula::Kind::refutes, {b1, b2}, {}};
    std::size_t v1 = add(disj, Rule::or_intro);
    std::size_t v2 = add({Formula::Kind::covers, {whole}, {b1, b2}}, Rule::interval_axiom);
    std::size_t v3 = add(refutes(b1), Rule::constraint_axiom);
    std::size_t v4 = add(refutes(b2), Rule::constraint_axiom);

    ProofNode& cur = tree.nodes[current];
    cur.rule = Rule::forall_mp;
    cur.left = v1;
    cur.right = v2;
    tree.nodes[v1].left = v3;
    tree.nodes[v1].right = v4;
    return {v3, v4};
  }
};

}  // namespace

ProofTree build_tree(const Trace& t) {
  if (t.verdict != Verdict::unsat) throw TraceRejected("trace is not unsat", 0);
  // Side conditions the construction relies on.
  replay(t, ReplayMode::structural);

  Builder b(t);
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const TraceStep& step = t.steps[i];
    if (const auto* p = std::get_if<PruneStep>(&step)) {
      // Kept part stays open; the removed slab is closed by a constraint axiom.
      b.current = b.split(p->var, p->kept, p->removed).first;
    } else if (const auto* br = std::get_if<BranchStep>(&step)) {
      auto [taken, sibling] = b.split(br->var, br->taken, br->sibling);
      b.pending.push_back(sibling);
      b.current = taken;
    } else if (std::holds_alternative<BacktrackStep>(step)) {
      // The current leaf stays a constraint axiom; resume the sibling leaf.
      if (b.pending.empty()) throw TraceRejected("backtrack without a pending branch", i);
      b.current = b.pending.back();
      b.pending.pop_back();
    } else {
      if (!b.pending.empty()) throw TraceRejected("fail with pending branches", i);
    }
  }
  return std::move(b.tree);
}

std::size_t tree_size(const ProofTree& p) { return p.nodes.size(); }

std::optional<RuleViolation> check_rules(const ProofTree& p) {
  using K = Formula::Kind;
  if (p.nodes.empty()) return RuleViolation{0, "empty tree"};
  if (p.root >= p.nodes.size()) return RuleViolation{p.root, "root out of range"};
  const Formula& root = p.nodes[p.root].label;
  if (root.kind != K::refutes || root.antecedent.size() != 1 || !root.consequent.empty() ||
      !(*root.antecedent[0] == p.system.initial_box())) {
    return RuleViolation{p.root, "root is not the negation of the input formula"};
  }

  std::vector<char> seen(p.nodes.size(), 0);
  std::vector<std::size_t> stack = {p.root};
  while (!stack.empty()) {
    std::size_t id = stack.back();
    stack.pop_back();
    if (seen[id]) return RuleViolation{id, "node shared or cyclic"};
    seen[id] = 1;
    const ProofNode& n = p.nodes[id];
    const Formula& f = n.label;
    for (const auto& b : f.antecedent) {
      if (!b || b->size() != p.system.size()) return RuleViolation{id, "box dimension mismatch"};
    }
    for (const auto& b : f.consequent) {
      if (!b || b->size() != p.system.size()) return RuleViolation{id, "box dimension mismatch"};
    }

    if (n.is_leaf()) {
      if (n.rule == Rule::constraint_axiom) {
        if (f.kind != K::refutes || f.antecedent.size() != 1 || !f.consequent.empty()) {
          return RuleViolation{id, "leaf does not match the constraint axiom schema"};
        }
      } else if (n.rule == Rule::interval_axiom) {
        if (!interval_axiom_of(f)) {
          return RuleViolation{id, "leaf does not match the interval axiom schema"};
        }
      } else {
        return RuleViolation{id, "inference rule on a leaf"};
      }
      continue;
    }
    if (!n.left || !n.right) return RuleViolation{id, "internal node needs two premises"};
    if (*n.left >= p.nodes.size() || *n.right >= p.nodes.size()) {
      return RuleViolation{id, "child out of range"};
    }
    const Formula& l = p.nodes[*n.left].label;
    const Formula& r = p.nodes[*n.right].label;
    switch (n.rule) {
      case Rule::or_intro: {
        // A -> not c, B -> not c  |-  A or B -> not c
        if (f.kind != K::refutes || l.kind != K::refutes || r.kind != K::refutes) {
          return RuleViolation{id, "or-intro premises must be refutations"};
        }
        std::vector<BoxRef> joined = l.antecedent;
        joined.insert(joined.end(), r.antecedent.begin(), r.antecedent.end());
        if (!same_boxes(f.antecedent, joined) || !f.consequent.empty()) {
          return RuleViolation{id, "or-intro conclusion does not join its premises"};
        }
        break;
      }
      case Rule::forall_mp: {
        // B -> not c, A -> B  |-  A -> not c
        if (f.kind != K::refutes || l.kind != K::refutes || r.kind != K::covers) {
          return RuleViolation{id, "forall-mp needs a refutation and a cover"};
        }
        if (!same_boxes(r.consequent, l.antecedent)) {
          return RuleViolation{id, "forall-mp minor premise does not imply the major one"};
        }
        if (!same_boxes(f.antecedent, r.antecedent) || !f.consequent.empty()) {
          return RuleViolation{id, "forall-mp conclusion mismatch"};
        }
        break;
      }
      default:
        return RuleViolation{id, "axiom rule on an internal node"};
    }
    stack.push_back(*n.right);
    stack.push_back(*n.left);
  }
  return std::nullopt;
}

std::string format_box(const Box& b, const System& s) {
  std::string out;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i) out += ' ';
    out += "(" + s.variables().at(i).name + " " + format_interval(b[i]) + ")";
  }
  return out;
}

std::string format_formula(const Formula& f, const System& s) {
  auto disj = [&](const std::vector<BoxRef>& boxes) {
    std::string out;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      if (i) out += " or ";
      out += "x in " + format_box(*boxes[i], s);
    }
    return out;
  };
  if (f.kind == Formula::Kind::refutes) return "forall x (" + disj(f.antecedent) + " -> not c)";
  return "forall x (" + disj(f.antecedent) + " -> " + disj(f.consequent) + ")";
}

}  // namespace dproof
