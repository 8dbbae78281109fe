#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "dproof/bap.hpp"

using namespace dproof;
namespace fs = std::filesystem;

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

const char* kSatisfiable = R"(
(declare-fun x () Real)
(assert (<= -2 x))
(assert (<= x 2))
(assert (<= (* x x) 1))
(assert (>= x 0))
)";

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("dproof_bap_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("example 1 proves in one round") {
  ProveOutcome o = branch_and_prove(parse_system(kExample1));
  CHECK(o.status == ProveOutcome::Status::proved);
  CHECK(o.stats.rounds == 1);
  CHECK(o.stats.subproblems == 0);
  CHECK(o.stats.axioms == 3);
  CHECK(o.stats.proof_lines == 5);
  CHECK(o.stats.proofs == 1);
}

TEST_CASE("natural-only checking forces refinement rounds") {
  System s = parse_system(kDependency);
  std::vector<std::size_t> indices;
  ProveOutcome o = branch_and_prove(s, {}, {.use_taylor = false}, {},
                                    [&](std::size_t k, const Trace& t, const CheckReport&) {
                                      indices.push_back(k);
                                      CHECK(t.verdict == Verdict::unsat);
                                    });
  CHECK(o.status == ProveOutcome::Status::proved);
  CHECK(o.stats.rounds >= 2);
  CHECK(o.stats.subproblems >= 2);
  CHECK(indices.size() == o.stats.proofs);
  for (std::size_t k = 0; k < indices.size(); ++k) CHECK(indices[k] == k);

  ProveOutcome taylor = branch_and_prove(s);
  CHECK(taylor.status == ProveOutcome::Status::proved);
  CHECK(taylor.stats.rounds == 1);

  Budget one;
  one.max_rounds = 1;
  ProveOutcome cut = branch_and_prove(s, {}, {.use_taylor = false}, one);
  CHECK(cut.status == ProveOutcome::Status::exhausted);

  Budget few;
  few.max_subproblems = 1;
  CHECK(branch_and_prove(s, {}, {.use_taylor = false}, few).status == ProveOutcome::Status::exhausted);
}

TEST_CASE("satisfiable theorem is disproved") {
  System s = parse_system(kSatisfiable);
  ProveOutcome o = branch_and_prove(s);
  REQUIRE(o.status == ProveOutcome::Status::disproved);
  CHECK(satisfied_at(s.atoms(), o.witness));
}

TEST_CASE("solver step budget leads to exhaustion") {
  SolverConfig cfg;
  cfg.max_steps = 2;
  System s = parse_system(
      "(declare-fun x () Real)(assert (<= -3 x))(assert (<= x 3))"
      "(assert (<= (+ (* (sin x) (sin x)) (* (cos x) (cos x))) 0.99))");
  ProveOutcome o = branch_and_prove(s, cfg);
  CHECK(o.status == ProveOutcome::Status::exhausted);
  CHECK(o.detail.find("step budget") != std::string::npos);
}

TEST_CASE("invalid budget") {
  Budget b;
  b.max_rounds = 0;
  CHECK_THROWS_AS(branch_and_prove(parse_system(kExample1), {}, {}, b), std::invalid_argument);
}

TEST_CASE("corpus runner") {
  TempDir dir;
  std::vector<std::string> paths = {dir.write("ex1.smt2", kExample1),
                                    dir.write("dep.smt2", kDependency),
                                    dir.write("sat.smt2", kSatisfiable)};
  CorpusOptions opt;
  auto rows = run_corpus(paths, opt);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].id == "ex1");
  CHECK(rows[0].verdict == "proved");
  CHECK(rows[0].vars == 2);
  CHECK(rows[0].arith == 3);
  CHECK(rows[2].verdict == "disproved");

  std::string csv = format_csv(rows);
  CHECK(csv.rfind("ID,#Var,#Arith,verdict,Time_S,ProofSize,#Sub,#Axiom,Time_PC\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  std::string quiet = format_csv(rows, false);
  CHECK(quiet.find("\nex1,2,3,proved,-,5,0,3,-\n") != std::string::npos);

  std::string table = format_table(rows);
  CHECK(table.rfind("ID ", 0) == 0);

  SUBCASE("empty corpus") {
    auto none = run_corpus({}, opt);
    CHECK(none.empty());
    CHECK(format_csv(none) == "ID,#Var,#Arith,verdict,Time_S,ProofSize,#Sub,#Axiom,Time_PC\n");
  }
  SUBCASE("malformed and missing files") {
    std::vector<std::string> mixed = {paths[0], dir.write("bad.smt2", "(assert (<= x"),
                                      (dir.path / "missing.smt2").string(), paths[1]};
    auto r = run_corpus(mixed, opt);
    REQUIRE(r.size() == 4);
    CHECK(r[0].verdict == "proved");
    CHECK(r[1].verdict == "error");
    CHECK(r[2].verdict == "error");
    CHECK(r[3].verdict == "proved");
  }
  SUBCASE("proof files are deterministic") {
    CorpusOptions a = opt, b = opt;
    a.proof_dir = (dir.path / "a").string();
    b.proof_dir = (dir.path / "b").string();
    a.checker.use_taylor = b.checker.use_taylor = false;
    auto ra = run_corpus(paths, a);
    auto rb = run_corpus(paths, b);
    CHECK(format_csv(ra, false) == format_csv(rb, false));
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(*a.proof_dir)) {
      std::ifstream fa(e.path()), fb(fs::path(*b.proof_dir) / e.path().filename());
      std::string sa((std::istreambuf_iterator<char>(fa)), {});
      std::string sb((std::istreambuf_iterator<char>(fb)), {});
      CHECK(sa == sb);
      ++files;
    }
    CHECK(files >= 3);
    CHECK(fs::exists(fs::path(*a.proof_dir) / "dep.1.dproof"));
  }
}
