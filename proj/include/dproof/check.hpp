#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dproof/expr.hpp"
#include "dproof/interval.hpp"
#include "dproof/proof.hpp"

namespace dproof {

struct CheckerConfig {
  bool use_taylor = true;
  bool subgradient_envelope = false;
  // Budget for axiom splits handed back as subproblems.
  std::size_t max_splits = 64;
};

bool check_ia(const IntervalAxiom& a);

// Mean-value enclosure f(a) + sum_i #(df/dx_i)(d) * (d_i - a_i). Throws
// NonDifferentiable when f is not differentiable on d (including domain
// clipping) and std::invalid_argument when the center is outside d.
Interval taylor_bound(const Term& f, const Box& d, std::span<const double> center,
                      DeriveOptions options = {});

struct Subproblem {
  Box box;
  double delta;
};

// min(delta, w/4) with w the max width of b; w/4 is rounded down.
double refined_delta(double delta, const Box& b);

enum class Method { empty_box, natural, taylor };
std::string_view method_name(Method m);

struct CaOutcome {
  enum class Kind { valid, split, invalid_hint, unsplittable };
  Kind kind = Kind::valid;
  Method method = Method::empty_box;             // valid only
  std::vector<Subproblem> children;              // split only
  std::vector<double> witness;                   // invalid_hint only
  std::size_t taylor_calls = 0;
};

// Refutation engine for one system: natural extension, then the mean-value
// form at a fixed set of corners. Derivatives are computed once.
class ConstraintChecker {
 public:
  ConstraintChecker(const System& s, CheckerConfig config = {});

  struct Refutation {
    Method method;
    std::size_t atom;  // certifying atom; 0 for an empty box
  };

  // Method that certifies c false on b, if any.
  std::optional<Method> refute(const Box& b, std::size_t* taylor_calls = nullptr) const;
  std::optional<Refutation> refute_by(const Box& b, bool natural_only = false,
                                      std::size_t* taylor_calls = nullptr) const;
  // Mean-value enclosure of atom k on b intersected with its natural
  // extension, or nullopt when the form does not apply.
  std::optional<Interval> taylor_enclosure(std::size_t atom, const Box& b) const;

  CaOutcome check_ca(const Box& b, double delta) const;

  // A point of b that provably satisfies c, if the fixed probe set finds one.
  std::optional<std::vector<double>> find_counterexample(const Box& b) const;

  const System& system() const { return system_; }
  const CheckerConfig& config() const { return config_; }

 private:
  System system_;
  CheckerConfig config_;
  // gradient_[k][i]: derivative of atom k in variable i (nullopt when the
  // atom is not differentiable).
  std::vector<std::optional<std::vector<Term>>> gradient_;
};

struct CheckStats {
  std::size_t axioms = 0;
  std::size_t interval_axioms = 0;
  std::size_t constraint_axioms = 0;
  std::size_t taylor_calls = 0;
  std::size_t splits = 0;
};

struct CheckReport {
  enum class Verdict { valid, needs_refinement, counterexample, malformed };
  Verdict verdict = Verdict::valid;
  std::vector<Subproblem> subproblems;
  std::string reason;                  // malformed only
  std::optional<std::size_t> node;     // offending node
  std::vector<double> witness;         // counterexample only
  std::vector<std::string> lines;      // one per axiom
  CheckStats stats;
};

std::string_view verdict_name(CheckReport::Verdict v);

CheckReport check_tree(const ProofTree& p, double delta, const CheckerConfig& config = {});

// Structured text: one line per axiom, then a summary line.
std::string format_report(const CheckReport& r);

}  // namespace dproof
