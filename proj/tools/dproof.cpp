// dproof: solve, prove, check, bap and bench on SMT-LIB QF_NRA inputs.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dproof/bap.hpp"

using namespace dproof;
namespace fs = std::filesystem;

namespace {

constexpr int kUsage = 64;
constexpr int kNoInput = 66;
constexpr int kError = 3;

struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot write " + path);
  out << text;
}

struct Options {
  std::string input;
  std::vector<std::string> inputs;
  double delta = 1e-3;
  double epsilon = 0;
  double timeout = 300;
  std::size_t max_steps = 2'000'000;
  std::string proof_out;
  std::string system;
  std::string proof_dir;
  std::string format = "text";
  std::string out;
  bool no_taylor = false;
  bool no_timing = false;
  std::size_t max_splits = 64;
  std::size_t max_rounds = 32;
};

SolverConfig solver_config(const Options& o) {
  SolverConfig c;
  c.delta = o.delta;
  if (o.epsilon > 0) c.epsilon = o.epsilon;
  c.max_steps = o.max_steps;
  c.deadline = std::chrono::steady_clock::now() +
               std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                   std::chrono::duration<double>(o.timeout));
  return c;
}

CheckerConfig checker_config(const Options& o) {
  CheckerConfig c;
  c.use_taylor = !o.no_taylor;
  c.max_splits = o.max_splits;
  return c;
}

Budget budget(const Options& o) {
  Budget b;
  b.max_rounds = o.max_rounds;
  b.wall_seconds = o.timeout;
  return b;
}

int exit_for(Verdict v) {
  switch (v) {
    case Verdict::unsat: return 0;
    case Verdict::delta_sat: return 1;
    case Verdict::timeout: return 2;
  }
  return kError;
}

void print_verdict(const Trace& t) {
  std::cout << verdict_name(t.verdict) << "\n";
  if (t.verdict == Verdict::delta_sat) std::cout << format_box(t.witness, t.system) << "\n";
}

int run_solve(const Options& o) {
  System s = parse_system(slurp(o.input));
  Trace t = solve(s, solver_config(o));
  print_verdict(t);
  if (!o.proof_out.empty()) spit(o.proof_out, serialize_trace(t));
  return exit_for(t.verdict);
}

int run_prove(const Options& o) {
  System s = parse_system(slurp(o.input));
  Trace t = solve(s, solver_config(o));
  print_verdict(t);
  if (t.verdict != Verdict::unsat) return exit_for(t.verdict);
  std::string path = o.proof_out.empty() ? fs::path(o.input).replace_extension(".dproof").string()
                                         : o.proof_out;
  spit(path, serialize_trace(t));
  std::cout << proof_line_count(t) << " lines written to " << path << "\n";
  return 0;
}

int run_check(const Options& o) {
  std::string text = slurp(o.input);
  std::optional<System> external;
  if (!o.system.empty()) external = parse_system(slurp(o.system));
  Trace t = parse_trace(text, external ? &*external : nullptr);
  CheckReport r = check_tree(build_tree(t), o.delta, checker_config(o));
  std::cout << format_report(r);
  switch (r.verdict) {
    case CheckReport::Verdict::valid: return 0;
    case CheckReport::Verdict::counterexample: return 1;
    case CheckReport::Verdict::needs_refinement: return 2;
    case CheckReport::Verdict::malformed: return kError;
  }
  return kError;
}

int exit_for(ProveOutcome::Status s) {
  switch (s) {
    case ProveOutcome::Status::proved: return 0;
    case ProveOutcome::Status::disproved: return 1;
    case ProveOutcome::Status::exhausted: return 2;
  }
  return kError;
}

int run_bap(const Options& o) {
  System s = parse_system(slurp(o.input));
  ProofSink sink;
  std::string id = fs::path(o.input).stem().string();
  if (!o.proof_dir.empty()) {
    fs::create_directories(o.proof_dir);
    sink = [&](std::size_t k, const Trace& t, const CheckReport&) {
      std::string name = id + (k == 0 ? "" : "." + std::to_string(k)) + ".dproof";
      spit((fs::path(o.proof_dir) / name).string(), serialize_trace(t));
    };
  }
  SolverConfig cfg = solver_config(o);
  cfg.deadline.reset();
  ProveOutcome r = branch_and_prove(s, cfg, checker_config(o), budget(o), sink);
  const ProveStats& st = r.stats;
  std::cout << status_name(r.status) << "\n" << r.detail << "\n";
  std::cout << "rounds " << st.rounds << ", subproblems " << st.subproblems << ", axioms "
            << st.axioms << ", proof lines " << st.proof_lines << "\n";
  if (!o.no_timing) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "solve %.3f s, check %.3f s\n", st.solve_seconds, st.check_seconds);
    std::cout << buf;
  }
  return exit_for(r.status);
}

int run_bench(const Options& o) {
  std::vector<std::string> paths;
  for (const auto& in : o.inputs) {
    if (fs::is_directory(in)) {
      std::vector<std::string> found;
      for (const auto& e : fs::directory_iterator(in)) {
        if (e.path().extension() == ".smt2") found.push_back(e.path().string());
      }
      std::sort(found.begin(), found.end());
      paths.insert(paths.end(), found.begin(), found.end());
    } else {
      paths.push_back(in);
    }
  }
  CorpusOptions opt;
  opt.solver = solver_config(o);
  opt.solver.deadline.reset();
  opt.checker = checker_config(o);
  opt.budget = budget(o);
  if (!o.proof_dir.empty()) opt.proof_dir = o.proof_dir;
  auto rows = run_corpus(paths, opt);
  std::string table = o.format == "csv" ? format_csv(rows, !o.no_timing)
                                        : format_table(rows, !o.no_timing);
  if (o.out.empty()) {
    std::cout << table;
  } else {
    spit(o.out, table);
  }
  for (const auto& r : rows) {
    if (r.verdict == "error") std::cerr << r.id << ": " << r.detail << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proof-producing interval constraint solver"};
  app.require_subcommand(1);
  Options o;

  auto positive = CLI::PositiveNumber;
  auto add_solver = [&](CLI::App* c) {
    c->add_option("--delta", o.delta, "Precision delta")->check(positive);
    c->add_option("--epsilon", o.epsilon, "Minimum branching width (default delta/1024)")->check(positive);
    c->add_option("--timeout", o.timeout, "Wall-time budget in seconds")->check(positive);
    c->add_option("--max-steps", o.max_steps, "Solver step budget")->check(positive);
  };
  auto add_checker = [&](CLI::App* c) {
    c->add_flag("--no-taylor", o.no_taylor, "Check axioms with the natural extension only");
    c->add_option("--max-splits", o.max_splits, "Subproblem budget")->check(positive);
  };

  auto* solve_cmd = app.add_subcommand("solve", "Decide a system: unsat or delta-sat");
  solve_cmd->add_option("file", o.input, "SMT-LIB input")->required();
  solve_cmd->add_option("-o,--proof-out", o.proof_out, "Write the trace here");
  add_solver(solve_cmd);

  auto* prove_cmd = app.add_subcommand("prove", "Solve and write an unsat proof");
  prove_cmd->add_option("file", o.input, "SMT-LIB input")->required();
  prove_cmd->add_option("-o,--proof-out", o.proof_out, "Proof path (default <input>.dproof)");
  add_solver(prove_cmd);

  auto* check_cmd = app.add_subcommand("check", "Check a proof file");
  check_cmd->add_option("proof", o.input, "Proof file")->required();
  check_cmd->add_option("--system", o.system, "SMT-LIB system the proof refers to");
  check_cmd->add_option("--delta", o.delta, "Precision delta for refinement")->check(positive);
  add_checker(check_cmd);

  auto* bap_cmd = app.add_subcommand("bap", "Branch-and-prove until every axiom checks");
  bap_cmd->add_option("file", o.input, "SMT-LIB input")->required();
  bap_cmd->add_option("--proof-dir", o.proof_dir, "Write every checked proof here");
  bap_cmd->add_option("--max-rounds", o.max_rounds, "Refinement round budget")->check(positive);
  bap_cmd->add_flag("--no-timing", o.no_timing, "Omit timings");
  add_solver(bap_cmd);
  add_checker(bap_cmd);

  auto* bench_cmd = app.add_subcommand("bench", "Run branch-and-prove over a corpus");
  bench_cmd->add_option("inputs", o.inputs, "Files or directories of .smt2 instances");
  bench_cmd->add_option("--format", o.format, "text or csv")->check(CLI::IsMember({"text", "csv"}));
  bench_cmd->add_option("--out", o.out, "Write the table here");
  bench_cmd->add_option("--proof-dir", o.proof_dir, "Write every checked proof here");
  bench_cmd->add_option("--max-rounds", o.max_rounds, "Refinement round budget")->check(positive);
  bench_cmd->add_flag("--no-timing", o.no_timing, "Print '-' for timing columns");
  add_solver(bench_cmd);
  add_checker(bench_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*solve_cmd) return run_solve(o);
    if (*prove_cmd) return run_prove(o);
    if (*check_cmd) return run_check(o);
    if (*bap_cmd) return run_bap(o);
    if (*bench_cmd) return run_bench(o);
  } catch (const FileError& e) {
    std::cerr << "dproof: " << e.what() << "\n";
    return kNoInput;
  } catch (const std::exception& e) {
    std::cerr << "dproof: " << e.what() << "\n";
    return kError;
  }
  return kUsage;
}
