#include "dproof/bap.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace dproof {

std::string_view status_name(ProveOutcome::Status s) {
  switch (s) {
    case ProveOutcome::Status::proved: return "proved";
    case ProveOutcome::Status::disproved: return "disproved";
    case ProveOutcome::Status::exhausted: return "exhausted";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Task {
  System system;
  double delta;
  std::size_t round;
};

std::string point_text(const System& s, const std::vector<double>& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ' ';
    out += "(" + s.variables()[i].name + " " + format_hex(p[i]) + ")";
  }
  return out;
}

}  // namespace

ProveOutcome branch_and_prove(const System& s, const SolverConfig& solver,
                              const CheckerConfig& checker, const Budget& budget,
                              const ProofSink& sink) {
  solver.validate();
  if (budget.max_rounds == 0 || !(budget.wall_seconds > 0)) {
    throw std::invalid_argument("budget must be positive");
  }
  const auto start = Clock::now();
  const auto deadline =
      start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(budget.wall_seconds));
  const std::size_t max_sub = budget.max_subproblems.value_or(checker.max_splits);

  ProveOutcome out;
  ProveStats& st = out.stats;
  auto stop = [&](ProveOutcome::Status status, std::string detail) {
    out.status = status;
    out.detail = std::move(detail);
    return out;
  };

  // Depth-first in leaf order: children are pushed in reverse.
  std::vector<Task> stack;
  stack.push_back({s, solver.delta, 1});
  while (!stack.empty()) {
    Task task = std::move(stack.back());
    stack.pop_back();
    st.rounds = std::max(st.rounds, task.round);

    SolverConfig cfg = solver;
    cfg.delta = task.delta;
    cfg.epsilon = std::min(solver.eps(), task.delta / 1024);
    cfg.deadline = deadline;

    auto t0 = Clock::now();
    Trace trace = solve(task.system, cfg);
    st.solve_seconds += seconds_since(t0);

    if (trace.verdict == Verdict::timeout) {
      return stop(ProveOutcome::Status::exhausted,
                  Clock::now() > deadline ? "wall-time budget exhausted"
                                          : "solver step budget exhausted");
    }
    if (trace.verdict == Verdict::delta_sat) {
      ConstraintChecker cc(task.system, checker);
      if (auto w = cc.find_counterexample(trace.witness)) {
        out.witness = *w;
        return stop(ProveOutcome::Status::disproved, "satisfying point " + point_text(s, *w));
      }
      return stop(ProveOutcome::Status::exhausted,
                  "delta-sat box " + format_box(trace.witness, s) + " without an exact witness");
    }

    auto t1 = Clock::now();
    CheckReport report;
    try {
      report = check_tree(build_tree(trace), task.delta, checker);
    } catch (const TraceRejected& e) {
      st.check_seconds += seconds_since(t1);
      return stop(ProveOutcome::Status::exhausted, std::string("solver trace rejected: ") + e.what());
    }
    st.check_seconds += seconds_since(t1);
    st.proof_lines += proof_line_count(trace);
    if (sink) sink(st.proofs, trace, report);
    ++st.proofs;

    switch (report.verdict) {
      case CheckReport::Verdict::valid:
        st.axioms += report.stats.axioms;
        break;
      case CheckReport::Verdict::needs_refinement:
        st.axioms += report.stats.axioms - report.stats.splits;
        st.subproblems += report.subproblems.size();
        if (st.subproblems > max_sub) {
          return stop(ProveOutcome::Status::exhausted, "subproblem budget exhausted");
        }
        if (task.round + 1 > budget.max_rounds) {
          return stop(ProveOutcome::Status::exhausted, "round budget exhausted");
        }
        for (auto it = report.subproblems.rbegin(); it != report.subproblems.rend(); ++it) {
          stack.push_back({task.system.with_bounds(it->box), it->delta, task.round + 1});
        }
        break;
      case CheckReport::Verdict::counterexample:
        out.witness = report.witness;
        return stop(ProveOutcome::Status::disproved, "counterexample " + report.reason);
      case CheckReport::Verdict::malformed:
        return stop(ProveOutcome::Status::exhausted, "malformed proof: " + report.reason);
    }
    if (Clock::now() > deadline) {
      if (stack.empty()) break;
      return stop(ProveOutcome::Status::exhausted, "wall-time budget exhausted");
    }
  }
  return stop(ProveOutcome::Status::proved, "all proofs checked");
}

// ---- corpus runner ----

std::vector<CorpusRow> run_corpus(const std::vector<std::string>& paths,
                                  const CorpusOptions& options) {
  namespace fs = std::filesystem;
  std::vector<CorpusRow> rows;
  for (const auto& path : paths) {
    CorpusRow row;
    row.id = fs::path(path).stem().string();
    std::ifstream in(path);
    if (!in) {
      row.verdict = "error";
      row.detail = "cannot read " + path;
      rows.push_back(row);
      continue;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      System s = parse_system(buf.str());
      row.vars = s.size();
      row.arith = s.arith_count();
      ProofSink sink;
      if (options.proof_dir) {
        fs::create_directories(*options.proof_dir);
        sink = [&](std::size_t k, const Trace& t, const CheckReport&) {
          std::string name = row.id + (k == 0 ? "" : "." + std::to_string(k)) + ".dproof";
          std::ofstream f(fs::path(*options.proof_dir) / name, std::ios::binary);
          f << serialize_trace(t);
        };
      }
      ProveOutcome o = branch_and_prove(s, options.solver, options.checker, options.budget, sink);
      row.verdict = std::string(status_name(o.status));
      row.detail = o.detail;
      row.solve_seconds = o.stats.solve_seconds;
      row.check_seconds = o.stats.check_seconds;
      row.proof_size = o.stats.proof_lines;
      row.subproblems = o.stats.subproblems;
      row.axioms = o.stats.axioms;
    } catch (const std::exception& e) {
      row.verdict = "error";
      row.detail = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

namespace {

const char* kColumns[] = {"ID", "#Var", "#Arith", "verdict", "Time_S",
                          "ProofSize", "#Sub", "#Axiom", "Time_PC"};

std::string fixed3(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3f", v);
  return b;
}

std::vector<std::string> cells(const CorpusRow& r, bool timing) {
  return {r.id,
          std::to_string(r.vars),
          std::to_string(r.arith),
          r.verdict,
          timing ? fixed3(r.solve_seconds) : "-",
          std::to_string(r.proof_size),
          std::to_string(r.subproblems),
          std::to_string(r.axioms),
          timing ? fixed3(r.check_seconds) : "-"};
}

}  // namespace

std::string format_csv(const std::vector<CorpusRow>& rows, bool timing) {
  std::string out;
  for (std::size_t i = 0; i < std::size(kColumns); ++i) {
    out += (i ? "," : "") + std::string(kColumns[i]);
  }
  out += '\n';
  for (const auto& r : rows) {
    auto c = cells(r, timing);
    for (std::size_t i = 0; i < c.size(); ++i) out += (i ? "," : "") + c[i];
    out += '\n';
  }
  return out;
}

std::string format_table(const std::vector<CorpusRow>& rows, bool timing) {
  std::vector<std::vector<std::string>> grid;
  grid.emplace_back(std::begin(kColumns), std::end(kColumns));
  for (const auto& r : rows) grid.push_back(cells(r, timing));
  std::vector<std::size_t> w(std::size(kColumns), 0);
  for (const auto& line : grid) {
    for (std::size_t i = 0; i < line.size(); ++i) w[i] = std::max(w[i], line[i].size());
  }
  std::string out;
  for (const auto& line : grid) {
    std::string l;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i) l += "  ";
      // ID and verdict left-aligned, numbers right-aligned.
      bool left = i == 0 || i == 3;
      std::string pad(w[i] - line[i].size(), ' ');
      l += left ? line[i] + pad : pad + line[i];
    }
    while (!l.empty() && l.back() == ' ') l.pop_back();
    out += l + '\n';
  }
  return out;
}

}  // namespace dproof
