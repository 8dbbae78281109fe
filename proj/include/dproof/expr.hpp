#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dproof/interval.hpp"

namespace dproof {

using VarId = std::size_t;

// Immutable expression tree. Copies share structure.
class Term {
 public:
  enum class Kind : std::uint8_t { variable, constant, apply };

  static Term variable(VarId id);
  // `text` is the source literal; empty text prints the value itself.
  static Term constant(const Interval& value, std::string text = {});
  static Term apply(Fn fn, std::vector<Term> args, int exponent = 0);

  Kind kind() const;
  VarId var() const;                 // variable only
  const Interval& value() const;     // constant only
  const std::string& text() const;   // constant only
  Fn fn() const;                     // apply only
  int exponent() const;              // pow_int only
  std::span<const Term> args() const;

  bool is_constant(double v) const;

  // Number of apply nodes.
  std::size_t arith_count() const;
  // Variables in first-occurrence order.
  std::vector<VarId> variables() const;

  friend bool operator==(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

enum class Rel : std::uint8_t { eq, ne, gt, ge, lt, le };

std::string_view rel_name(Rel rel);

// term ~ 0
struct Atom {
  Term term;
  Rel rel;

  friend bool operator==(const Atom& a, const Atom& b) {
    return a.rel == b.rel && a.term == b.term;
  }
};

struct Variable {
  std::string name;
  Interval bounds;

  friend bool operator==(const Variable&, const Variable&) = default;
};

// Conjunction of atoms over bounded variables.
class System {
 public:
  System(std::vector<Variable> variables, std::vector<Atom> atoms);

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return variables_.size(); }
  std::optional<VarId> find(std::string_view name) const;

  Box initial_box() const;
  // Same atoms, variables rebounded to `box`.
  System with_bounds(const Box& box) const;

  // Canonical SMT-LIB text; reparsing it yields an identical System.
  std::string canonical_text() const;
  // Lowercase hex SHA-256 of canonical_text().
  std::string digest() const;

  std::size_t arith_count() const;

  friend bool operator==(const System&, const System&) = default;

 private:
  std::vector<Variable> variables_;
  std::vector<Atom> atoms_;
};

// ---- parsing and printing ----

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

System parse_system(std::string_view text);
std::string print_term(const Term& t, const System& sys);
std::string print_atom(const Atom& a, const System& sys);

// ---- evaluation ----

// Natural interval extension of t over b.
Interval eval_natural(const Term& t, const Box& b);
// As above; `regular` is cleared when some operation was applied outside
// the set where it is defined and differentiable.
Interval eval_natural(const Term& t, const Box& b, bool& regular);

// Relation test on an enclosure of the atom's term.
bool certifies_false(Rel rel, const Interval& value);
bool certifies_true(Rel rel, const Interval& value);

// True only if every point of b falsifies a.
bool atom_false_on(const Atom& a, const Box& b);
// True if at least one atom is certified false on b (or b is empty).
bool conjunction_false_on(std::span<const Atom> atoms, const Box& b);
// True if the point provably satisfies every atom.
bool satisfied_at(std::span<const Atom> atoms, std::span<const double> point);

// ---- differentiation ----

class NonDifferentiable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DeriveOptions {
  // Replace abs/min/max derivatives by sign envelopes instead of failing.
  bool subgradient_envelope = false;
};

Term derive(const Term& t, VarId v, DeriveOptions options = {});

}  // namespace dproof
