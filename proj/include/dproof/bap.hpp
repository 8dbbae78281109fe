#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dproof/check.hpp"
#include "dproof/icp.hpp"
#include "dproof/trace.hpp"

namespace dproof {

struct Budget {
  std::size_t max_rounds = 32;
  double wall_seconds = 300;
  // Total subproblems the loop may generate; default is the checker's
  // max_splits.
  std::optional<std::size_t> max_subproblems;
};

struct ProveStats {
  std::size_t rounds = 0;
  std::size_t subproblems = 0;
  std::size_t axioms = 0;
  std::size_t proof_lines = 0;
  std::size_t proofs = 0;
  double solve_seconds = 0;
  double check_seconds = 0;
};

struct ProveOutcome {
  enum class Status { proved, disproved, exhausted };
  Status status = Status::exhausted;
  std::string detail;
  std::vector<double> witness;  // disproved only
  ProveStats stats;
};

std::string_view status_name(ProveOutcome::Status s);

// Called once per checked proof, in the order proofs are produced.
using ProofSink = std::function<void(std::size_t index, const Trace& trace, const CheckReport& report)>;

ProveOutcome branch_and_prove(const System& s, const SolverConfig& solver = {},
                              const CheckerConfig& checker = {}, const Budget& budget = {},
                              const ProofSink& sink = {});

// ---- corpus runner ----

struct CorpusRow {
  std::string id;
  std::size_t vars = 0;
  std::size_t arith = 0;
  std::string verdict;  // proved, disproved, exhausted or error
  double solve_seconds = 0;
  std::size_t proof_size = 0;
  std::size_t subproblems = 0;
  std::size_t axioms = 0;
  double check_seconds = 0;
  std::string detail;
};

struct CorpusOptions {
  SolverConfig solver;
  CheckerConfig checker;
  Budget budget;
  // When set, every checked proof is written here as <id>.dproof, with
  // later rounds as <id>.<n>.dproof.
  std::optional<std::string> proof_dir;
};

std::vector<CorpusRow> run_corpus(const std::vector<std::string>& paths, const CorpusOptions& options);

std::string format_csv(const std::vector<CorpusRow>& rows, bool timing = true);
std::string format_table(const std::vector<CorpusRow>& rows, bool timing = true);

}  // namespace dproof
