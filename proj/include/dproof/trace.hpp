#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dproof/expr.hpp"
#include "dproof/interval.hpp"

namespace dproof {

// var's interval becomes `kept`; the slab with var in `removed` is refuted.
struct PruneStep {
  VarId var;
  Interval removed;
  Interval kept;
  friend bool operator==(const PruneStep&, const PruneStep&) = default;
};

// d-assignment: var takes `taken`; `sibling` is explored on backtrack.
struct BranchStep {
  VarId var;
  Interval taken;
  Interval sibling;
  friend bool operator==(const BranchStep&, const BranchStep&) = default;
};

// Pops the most recent d-assignment and resumes with its sibling.
struct BacktrackStep {
  VarId var;
  Interval failed;
  Interval resumed;
  friend bool operator==(const BacktrackStep&, const BacktrackStep&) = default;
};

struct FailStep {
  friend bool operator==(const FailStep&, const FailStep&) = default;
};

using TraceStep = std::variant<PruneStep, BranchStep, BacktrackStep, FailStep>;

enum class Verdict { unsat, delta_sat, timeout };

std::string_view verdict_name(Verdict v);

struct Trace {
  System system;
  Box initial_box;
  std::vector<TraceStep> steps;
  Verdict verdict = Verdict::unsat;
  Box witness;  // delta_sat only

  explicit Trace(System s) : system(std::move(s)), initial_box(system.initial_box()) {}

  friend bool operator==(const Trace&, const Trace&) = default;
};

// ---- file format ----

class TraceFormatError : public std::runtime_error {
 public:
  TraceFormatError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct SerializeOptions {
  // Append the canonical system text so the file is self-contained.
  bool embed_system = true;
};

std::string serialize_trace(const Trace& t, SerializeOptions options = {});

// `system` binds the header hash when given; otherwise the embedded text is
// used. Either way the header hash must match.
Trace parse_trace(std::string_view text, const System* system = nullptr);

// Number of proof lines: header plus one line per step and verdict.
std::size_t proof_line_count(const Trace& t);

// ---- replay ----

class TraceRejected : public std::runtime_error {
 public:
  TraceRejected(const std::string& what, std::size_t step)
      : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

enum class ReplayMode {
  // Only what tree construction needs: stack discipline and branch covers.
  structural,
  // Every side condition of the transition system, including prune covers.
  strict,
};

struct ReplayResult {
  Box final_box;
  std::size_t max_depth = 0;
};

// Replays the steps from the initial box; throws TraceRejected.
ReplayResult replay(const Trace& t, ReplayMode mode = ReplayMode::strict);

}  // namespace dproof
