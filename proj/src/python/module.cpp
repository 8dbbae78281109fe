#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <chrono>
#include <sstream>

#include "dproof/bap.hpp"

namespace py = pybind11;
using namespace dproof;

namespace {

std::pair<double, double> pair_of(const Interval& i) { return {i.lo(), i.hi()}; }

py::list box_list(const Box& b) {
  py::list out;
  for (const auto& i : b.dims()) {
    if (i.is_empty()) {
      out.append(py::none());
    } else {
      out.append(py::make_tuple(i.lo(), i.hi()));
    }
  }
  return out;
}

SolverConfig solver_config(double delta, std::optional<double> epsilon, std::size_t max_steps,
                           std::optional<double> timeout, bool round_robin) {
  SolverConfig c;
  c.delta = delta;
  c.epsilon = epsilon;
  c.max_steps = max_steps;
  c.branch_rule = round_robin ? BranchRule::round_robin : BranchRule::widest_first;
  if (timeout) {
    c.deadline = std::chrono::steady_clock::now() +
                 std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                     std::chrono::duration<double>(*timeout));
  }
  return c;
}

py::dict report_dict(const CheckReport& r) {
  py::dict d;
  d["verdict"] = std::string(verdict_name(r.verdict));
  d["axioms"] = r.stats.axioms;
  d["interval_axioms"] = r.stats.interval_axioms;
  d["constraint_axioms"] = r.stats.constraint_axioms;
  d["taylor_calls"] = r.stats.taylor_calls;
  d["reason"] = r.reason;
  d["witness"] = r.witness;
  py::list subs;
  for (const auto& s : r.subproblems) subs.append(py::make_tuple(box_list(s.box), s.delta));
  d["subproblems"] = subs;
  d["text"] = format_report(r);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Proof-producing interval constraint solving";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<TraceFormatError>(m, "TraceFormatError", PyExc_ValueError);
  py::register_exception<TraceRejected>(m, "TraceRejected", PyExc_ValueError);

  py::class_<Interval>(m, "Interval")
      .def(py::init<>())
      .def(py::init<double, double>(), py::arg("lo"), py::arg("hi"))
      .def_static("point", &Interval::point)
      .def_static("entire", &Interval::entire)
      .def_property_readonly("lo", &Interval::lo)
      .def_property_readonly("hi", &Interval::hi)
      .def("is_empty", &Interval::is_empty)
      .def("contains", &Interval::contains)
      .def("subset_of", &Interval::subset_of)
      .def("__add__", [](const Interval& a, const Interval& b) { return a + b; })
      .def("__sub__", [](const Interval& a, const Interval& b) { return a - b; })
      .def("__mul__", [](const Interval& a, const Interval& b) { return a * b; })
      .def("__truediv__", [](const Interval& a, const Interval& b) { return a / b; })
      .def("__neg__", [](const Interval& a) { return -a; })
      .def("__pow__", [](const Interval& a, int n) { return pow_int(a, n); })
      .def("__eq__", [](const Interval& a, const Interval& b) { return a == b; })
      .def("__repr__", [](const Interval& i) { return format_interval(i); });

  m.def("sqrt", py::overload_cast<const Interval&>(&dproof::sqrt));
  m.def("exp", py::overload_cast<const Interval&>(&dproof::exp));
  m.def("log", py::overload_cast<const Interval&>(&dproof::log));
  m.def("sin", py::overload_cast<const Interval&>(&dproof::sin));
  m.def("cos", py::overload_cast<const Interval&>(&dproof::cos));
  m.def("tan", py::overload_cast<const Interval&>(&dproof::tan));
  m.def("atan", py::overload_cast<const Interval&>(&dproof::atan));
  m.def("atan2", py::overload_cast<const Interval&, const Interval&>(&dproof::atan2));
  m.def("format_hex", &format_hex);

  py::class_<System>(m, "System")
      .def_static("parse", &parse_system, py::arg("text"))
      .def_property_readonly("variables",
                             [](const System& s) {
                               py::list out;
                               for (const auto& v : s.variables()) {
                                 out.append(py::make_tuple(v.name, pair_of(v.bounds)));
                               }
                               return out;
                             })
      .def_property_readonly("atoms",
                             [](const System& s) {
                               std::vector<std::string> out;
                               for (const auto& a : s.atoms()) out.push_back(print_atom(a, s));
                               return out;
                             })
      .def("is_satisfied_at",
           [](const System& s, std::vector<double> p) {
             if (p.size() != s.size()) throw std::invalid_argument("point has wrong dimension");
             return satisfied_at(s.atoms(), p);
           })
      .def("canonical_text", &System::canonical_text)
      .def("digest", &System::digest)
      .def("arith_count", &System::arith_count)
      .def("__len__", &System::size)
      .def("__eq__", [](const System& a, const System& b) { return a == b; });

  py::class_<Trace>(m, "Trace")
      .def_property_readonly("verdict", [](const Trace& t) { return std::string(verdict_name(t.verdict)); })
      .def_property_readonly("witness", [](const Trace& t) { return box_list(t.witness); })
      .def_property_readonly("steps", [](const Trace& t) { return t.steps.size(); })
      .def_property_readonly("system", [](const Trace& t) { return t.system; })
      .def("serialize", [](const Trace& t, bool embed) { return serialize_trace(t, {.embed_system = embed}); },
           py::arg("embed_system") = true)
      .def("line_count", [](const Trace& t) { return proof_line_count(t); });

  m.def("parse_trace",
        [](const std::string& text, std::optional<System> system) {
          return parse_trace(text, system ? &*system : nullptr);
        },
        py::arg("text"), py::arg("system") = py::none());

  m.def("solve",
        [](const System& s, double delta, std::optional<double> epsilon, std::size_t max_steps,
           std::optional<double> timeout, bool round_robin) {
          SolverConfig cfg = solver_config(delta, epsilon, max_steps, timeout, round_robin);
          py::gil_scoped_release nogil;
          return solve(s, cfg);
        },
        py::arg("system"), py::arg("delta") = 1e-3, py::arg("epsilon") = py::none(),
        py::arg("max_steps") = 2'000'000, py::arg("timeout") = py::none(),
        py::arg("round_robin") = false);

  m.def("check",
        [](const Trace& t, double delta, bool use_taylor, std::size_t max_splits) {
          CheckerConfig cfg;
          cfg.use_taylor = use_taylor;
          cfg.max_splits = max_splits;
          CheckReport r;
          {
            py::gil_scoped_release nogil;
            r = check_tree(build_tree(t), delta, cfg);
          }
          return report_dict(r);
        },
        py::arg("trace"), py::arg("delta") = 1e-3, py::arg("use_taylor") = true,
        py::arg("max_splits") = 64);

  m.def("branch_and_prove",
        [](const System& s, double delta, bool use_taylor, std::size_t max_rounds,
           double wall_seconds, std::optional<std::size_t> max_subproblems) {
          CheckerConfig checker;
          checker.use_taylor = use_taylor;
          Budget b;
          b.max_rounds = max_rounds;
          b.wall_seconds = wall_seconds;
          b.max_subproblems = max_subproblems;
          ProveOutcome o;
          {
            py::gil_scoped_release nogil;
            o = branch_and_prove(s, solver_config(delta, std::nullopt, 2'000'000, std::nullopt, false),
                                 checker, b);
          }
          py::dict d;
          d["status"] = std::string(status_name(o.status));
          d["detail"] = o.detail;
          d["witness"] = o.witness;
          d["rounds"] = o.stats.rounds;
          d["subproblems"] = o.stats.subproblems;
          d["axioms"] = o.stats.axioms;
          d["proof_lines"] = o.stats.proof_lines;
          d["proofs"] = o.stats.proofs;
          d["solve_seconds"] = o.stats.solve_seconds;
          d["check_seconds"] = o.stats.check_seconds;
          return d;
        },
        py::arg("system"), py::arg("delta") = 1e-3, py::arg("use_taylor") = true,
        py::arg("max_rounds") = 32, py::arg("wall_seconds") = 300.0,
        py::arg("max_subproblems") = py::none());

  m.def("bench_csv",
        [](const std::vector<std::string>& paths, bool timing, bool use_taylor) {
          CorpusOptions opt;
          opt.checker.use_taylor = use_taylor;
          std::vector<CorpusRow> rows;
          {
            py::gil_scoped_release nogil;
            rows = run_corpus(paths, opt);
          }
          return format_csv(rows, timing);
        },
        py::arg("paths"), py::arg("timing") = true, py::arg("use_taylor") = true);
}
