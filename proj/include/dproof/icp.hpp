#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <vector>

#include "dproof/check.hpp"
#include "dproof/expr.hpp"
#include "dproof/trace.hpp"

namespace dproof {

enum class BranchRule { widest_first, round_robin };

struct SolverConfig {
  double delta = 1e-3;
  std::optional<double> epsilon;  // default delta / 1024
  std::size_t max_steps = 2'000'000;
  BranchRule branch_rule = BranchRule::widest_first;
  // A contraction is significant when it removes more than this fraction of
  // the interval; default delta / 10.
  std::optional<double> prune_fixpoint_slack;
  // Certify slabs with the mean-value form as well as the natural extension.
  bool use_taylor = true;
  std::optional<std::chrono::steady_clock::time_point> deadline;

  double eps() const { return epsilon.value_or(delta / 1024); }
  double slack() const { return prune_fixpoint_slack.value_or(delta / 10); }
  // Throws std::invalid_argument for non-positive parameters.
  void validate() const;
};

// Forward-backward contractor for one atom.
class Hc4 {
 public:
  explicit Hc4(const Term& t);
  // Box narrowed to points that may satisfy `t rel 0`; empty when none can.
  Box contract(const Box& b, Rel rel) const;

 private:
  struct Node {
    Term::Kind kind = Term::Kind::constant;
    Fn fn = Fn::add;
    int exponent = 0;
    VarId var = 0;
    Interval value;
    int a = -1;
    int b = -1;
  };
  std::vector<Node> nodes_;  // children precede parents
  int compile(const Term& t);
};

struct PruneResult {
  Box kept;
  std::vector<PruneStep> steps;  // one removed slab per step
};

// Contracts b with atom `atom` of the checker's system. Every removed slab
// is certified false for the whole conjunction before it is emitted.
PruneResult prune(const Box& b, std::size_t atom, const ConstraintChecker& cc,
                  const SolverConfig& cfg = {});

struct BranchResult {
  Box left;
  Box right;
  VarId var;
};

// Splits at the midpoint of the selected variable; throws std::domain_error
// when no variable has width >= epsilon. `cursor` drives round-robin.
BranchResult branch(const Box& b, const SolverConfig& cfg, std::size_t* cursor = nullptr);

// True when every atom is certified true on b or its enclosure is
// narrower than delta.
bool delta_consistent(const System& s, const Box& b, double delta);

Trace solve(const System& s, const SolverConfig& cfg = {});

}  // namespace dproof
