#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dproof/expr.hpp"
#include "dproof/trace.hpp"

namespace dproof {

using BoxRef = std::shared_ptr<const Box>;

// refutes: forall x (x in A1 or ... or x in Ak -> not c)
// covers:  forall x (x in A -> x in C1 or x in C2)
struct Formula {
  enum class Kind : std::uint8_t { refutes, covers };
  Kind kind = Kind::refutes;
  std::vector<BoxRef> antecedent;
  std::vector<BoxRef> consequent;  // covers only
};

// Compares box values, not pointers.
bool same_boxes(const std::vector<BoxRef>& a, const std::vector<BoxRef>& b);
bool operator==(const Formula& a, const Formula& b);

enum class Rule : std::uint8_t { or_intro, forall_mp, interval_axiom, constraint_axiom };

std::string_view rule_name(Rule r);

struct ProofNode {
  Formula label;
  Rule rule = Rule::constraint_axiom;
  // Internal nodes: left is the major premise, right the minor one.
  std::optional<std::size_t> left;
  std::optional<std::size_t> right;

  bool is_leaf() const { return !left && !right; }
};

struct ProofTree {
  System system;
  std::vector<ProofNode> nodes;
  std::size_t root = 0;

  explicit ProofTree(System s) : system(std::move(s)) {}

  // Leaf ids, left to right.
  std::vector<std::size_t> leaves() const;
};

// The interval axiom carried by a covers leaf: the boxes agree except at var.
struct IntervalAxiom {
  VarId var = 0;
  Interval whole;
  Interval part1;
  Interval part2;
};

// Nullopt when the label is not of the interval-axiom shape.
std::optional<IntervalAxiom> interval_axiom_of(const Formula& f);

// Case analysis over the trace steps; throws TraceRejected when the trace
// cannot be turned into a tree.
ProofTree build_tree(const Trace& t);

std::size_t tree_size(const ProofTree& p);

struct RuleViolation {
  std::size_t node;
  std::string reason;
};

// Re-derives every internal label from its children by the two inference
// schemas and checks that every leaf has an axiom shape.
std::optional<RuleViolation> check_rules(const ProofTree& p);

std::string format_box(const Box& b, const System& s);
std::string format_formula(const Formula& f, const System& s);

}  // namespace dproof
