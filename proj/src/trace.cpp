#include "dproof/trace.hpp"

#include <optional>
#include <sstream>

namespace dproof {

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::unsat: return "unsat";
    case Verdict::delta_sat: return "delta-sat";
    case Verdict::timeout: return "timeout";
  }
  return "?";
}

namespace {

constexpr std::string_view kMagic = "dproof";
constexpr std::string_view kVersion = "1";

std::string box_text(const Box& b, const System& s) {
  std::string out;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i) out += ' ';
    out += "(" + s.variables()[i].name + " " + format_interval(b[i]) + ")";
  }
  return out;
}

std::string step_text(const TraceStep& step, const System& s) {
  auto name = [&](VarId v) { return s.variables().at(v).name; };
  return std::visit(
      [&](const auto& st) -> std::string {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, PruneStep>) {
          return "prune " + name(st.var) + " removed " + format_interval(st.removed) + " kept " +
                 format_interval(st.kept);
        } else if constexpr (std::is_same_v<T, BranchStep>) {
          return "branch " + name(st.var) + " taken " + format_interval(st.taken) + " sibling " +
                 format_interval(st.sibling);
        } else if constexpr (std::is_same_v<T, BacktrackStep>) {
          return "backtrack " + name(st.var) + " failed " + format_interval(st.failed) +
                 " resumed " + format_interval(st.resumed);
        } else {
          return "fail";
        }
      },
      step);
}

// Cursor over one line of the proof file.
class LineReader {
 public:
  LineReader(std::string_view line, std::size_t number) : s_(line), line_(number) {}

  [[noreturn]] void fail(const std::string& msg) const { throw TraceFormatError(msg, line_); }

  void skip_space() {
    while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
  }

  bool at_end() {
    skip_space();
    return pos_ >= s_.size();
  }

  std::string_view word() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ' ' && s_[pos_] != '(' && s_[pos_] != ')' &&
           s_[pos_] != '[' && s_[pos_] != ']') {
      ++pos_;
    }
    if (start == pos_) fail("expected a word");
    return s_.substr(start, pos_ - start);
  }

  void expect(std::string_view w) {
    if (word() != w) fail("expected '" + std::string(w) + "'");
  }

  void expect_char(char c) {
    skip_space();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  Interval interval() {
    expect_char('[');
    std::string_view first = word();
    if (first == "empty") {
      expect_char(']');
      return {};
    }
    std::string_view second = word();
    expect_char(']');
    auto lo = parse_double(first);
    auto hi = parse_double(second);
    if (!lo || !hi) fail("malformed interval endpoint");
    try {
      return {*lo, *hi};
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }

  VarId var(const System& s) {
    std::string_view name = word();
    auto id = s.find(name);
    if (!id) fail("unknown variable " + std::string(name));
    return *id;
  }

  Box box(const System& s) {
    std::vector<Interval> dims;
    for (std::size_t i = 0; i < s.size(); ++i) {
      expect_char('(');
      if (var(s) != i) fail("box variables out of declaration order");
      dims.push_back(interval());
      expect_char(')');
    }
    if (!at_end()) fail("trailing text after box");
    return Box(std::move(dims));
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view l = text.substr(start, end - start);
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    lines.push_back(l);
    start = end + 1;
  }
  return lines;
}

}  // namespace

std::string serialize_trace(const Trace& t, SerializeOptions options) {
  const System& s = t.system;
  std::string out;
  out += std::string(kMagic) + " " + std::string(kVersion) + "\n";
  out += "system " + s.digest() + "\n";
  out += "box " + box_text(t.initial_box, s) + "\n";
  for (const auto& step : t.steps) out += step_text(step, s) + "\n";
  if (t.verdict == Verdict::delta_sat) out += "delta-sat " + box_text(t.witness, s) + "\n";
  if (t.verdict == Verdict::timeout) out += "timeout\n";
  if (options.embed_system) {
    std::string text = s.canonical_text();
    std::size_t n = 0;
    for (char c : text) n += c == '\n';
    out += "system-text " + std::to_string(n) + "\n" + text;
  }
  return out;
}

std::size_t proof_line_count(const Trace& t) {
  return 3 + t.steps.size() + (t.verdict == Verdict::unsat ? 0 : 1);
}

Trace parse_trace(std::string_view text, const System* external) {
  auto lines = split_lines(text);
  if (lines.empty()) throw TraceFormatError("empty proof file", 1);
  {
    LineReader r(lines[0], 1);
    if (r.word() != kMagic) r.fail("not a proof trace");
    std::string_view v = r.word();
    if (v != kVersion) r.fail("unsupported version " + std::string(v));
  }
  if (lines.size() < 3) throw TraceFormatError("truncated header", lines.size());

  // Embedded system block, if any: "system-text N" followed by N lines.
  std::size_t body_end = lines.size();
  std::optional<System> embedded;
  for (std::size_t i = 3; i < lines.size(); ++i) {
    if (lines[i].rfind("system-text ", 0) != 0) continue;
    LineReader r(lines[i], i + 1);
    r.expect("system-text");
    std::size_t n = 0;
    try {
      n = std::stoul(std::string(r.word()));
    } catch (const std::exception&) {
      r.fail("malformed system-text count");
    }
    if (i + 1 + n > lines.size()) {
      throw TraceFormatError("truncated system-text block", lines.size());
    }
    if (i + 1 + n < lines.size()) {
      throw TraceFormatError("text after system-text block", i + 2 + n);
    }
    std::string sys_text;
    for (std::size_t k = i + 1; k < lines.size(); ++k) {
      sys_text += lines[k];
      sys_text += '\n';
    }
    try {
      embedded.emplace(parse_system(sys_text));
    } catch (const ParseError& e) {
      throw TraceFormatError(std::string("embedded system: ") + e.what(), i + 1 + e.line());
    }
    body_end = i;
    break;
  }

  bool has_terminal = false;
  for (std::size_t i = 3; i < body_end; ++i) {
    std::string_view l = lines[i];
    if (l == "fail" || l == "timeout" || l.rfind("delta-sat ", 0) == 0) has_terminal = true;
  }
  if (!has_terminal) throw TraceFormatError("truncated proof: no terminal step", body_end);

  std::string hash;
  {
    LineReader r(lines[1], 2);
    r.expect("system");
    hash = std::string(r.word());
    if (!r.at_end()) r.fail("trailing text after hash");
  }
  if (embedded && embedded->digest() != hash) {
    throw TraceFormatError("hash mismatch: embedded system does not match header", 2);
  }
  if (external && external->digest() != hash) {
    throw TraceFormatError("hash mismatch: system does not match header", 2);
  }
  if (!external && !embedded) throw TraceFormatError("no system given and none embedded", 2);

  Trace t(external ? *external : *embedded);
  {
    LineReader r(lines[2], 3);
    r.expect("box");
    t.initial_box = r.box(t.system);
    if (!(t.initial_box == t.system.initial_box())) r.fail("box does not match system bounds");
  }

  bool terminated = false;
  for (std::size_t i = 3; i < body_end; ++i) {
    LineReader r(lines[i], i + 1);
    if (terminated) r.fail("text after terminal step");
    std::string_view kind = r.word();
    if (kind == "prune") {
      PruneStep s{r.var(t.system), {}, {}};
      r.expect("removed");
      s.removed = r.interval();
      r.expect("kept");
      s.kept = r.interval();
      t.steps.push_back(s);
    } else if (kind == "branch") {
      BranchStep s{r.var(t.system), {}, {}};
      r.expect("taken");
      s.taken = r.interval();
      r.expect("sibling");
      s.sibling = r.interval();
      t.steps.push_back(s);
    } else if (kind == "backtrack") {
      BacktrackStep s{r.var(t.system), {}, {}};
      r.expect("failed");
      s.failed = r.interval();
      r.expect("resumed");
      s.resumed = r.interval();
      t.steps.push_back(s);
    } else if (kind == "fail") {
      t.steps.push_back(FailStep{});
      t.verdict = Verdict::unsat;
      terminated = true;
    } else if (kind == "delta-sat") {
      t.witness = r.box(t.system);
      t.verdict = Verdict::delta_sat;
      terminated = true;
    } else if (kind == "timeout") {
      t.verdict = Verdict::timeout;
      terminated = true;
    } else {
      r.fail("unknown step '" + std::string(kind) + "'");
    }
    if (!r.at_end()) r.fail("trailing text");
  }
  if (!terminated) throw TraceFormatError("truncated proof: no terminal step", body_end);
  return t;
}

// ---- replay ----

ReplayResult replay(const Trace& t, ReplayMode mode) {
  struct Pending {
    VarId var;
    Interval taken;
    Interval sibling;
    Box saved;
  };
  const bool strict = mode == ReplayMode::strict;
  const std::size_t n = t.system.size();
  if (t.initial_box.size() != n) throw TraceRejected("initial box dimension mismatch", 0);
  Box box = t.initial_box;
  std::vector<Pending> stack;
  ReplayResult result;
  bool failed = false;

  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    if (failed) throw TraceRejected("steps after fail", i);
    const TraceStep& step = t.steps[i];
    if (const auto* p = std::get_if<PruneStep>(&step)) {
      if (p->var >= n) throw TraceRejected("variable out of range", i);
      const Interval& cur = box[p->var];
      if (strict) {
        if (box.is_empty()) throw TraceRejected("prune on an empty box", i);
        if (!p->kept.subset_of(cur)) throw TraceRejected("kept interval exceeds current", i);
        if (!covers_union(cur, p->removed, p->kept)) {
          throw TraceRejected("removed and kept do not cover the current interval", i);
        }
      }
      box = box.with(p->var, p->kept);
    } else if (const auto* b = std::get_if<BranchStep>(&step)) {
      if (b->var >= n) throw TraceRejected("variable out of range", i);
      const Interval& cur = box[b->var];
      if (!b->taken.subset_of(cur)) throw TraceRejected("taken interval exceeds current", i);
      if (!covers_union(cur, b->taken, b->sibling)) {
        throw TraceRejected("taken and sibling do not cover the current interval", i);
      }
      if (strict && box.is_empty()) throw TraceRejected("branch on an empty box", i);
      if (strict && !b->sibling.subset_of(cur)) {
        throw TraceRejected("sibling interval exceeds current", i);
      }
      stack.push_back({b->var, b->taken, b->sibling, box});
      result.max_depth = std::max(result.max_depth, stack.size());
      box = box.with(b->var, b->taken);
    } else if (const auto* k = std::get_if<BacktrackStep>(&step)) {
      if (stack.empty()) throw TraceRejected("backtrack without a pending branch", i);
      const Pending& top = stack.back();
      if (k->var != top.var || !(k->failed == top.taken) || !(k->resumed == top.sibling)) {
        throw TraceRejected("backtrack does not match the most recent branch", i);
      }
      box = top.saved.with(top.var, top.sibling);
      stack.pop_back();
    } else {
      if (!stack.empty()) throw TraceRejected("fail with pending branches", i);
      failed = true;
    }
  }
  if (t.verdict == Verdict::unsat && !failed) {
    throw TraceRejected("unsat trace does not end with fail", t.steps.size());
  }
  if (t.verdict != Verdict::unsat && failed) {
    throw TraceRejected("fail step in a trace that is not unsat", t.steps.size());
  }
  if (strict && t.verdict == Verdict::delta_sat && !(t.witness == box)) {
    throw TraceRejected("witness differs from the final box", t.steps.size());
  }
  result.final_box = box;
  return result;
}

}  // namespace dproof
