"""Interval constraint solving with checkable unsat proofs."""

from ._core import (
    Interval,
    ParseError,
    System,
    Trace,
    TraceFormatError,
    TraceRejected,
    atan,
    atan2,
    bench_csv,
    branch_and_prove,
    check,
    cos,
    exp,
    format_hex,
    log,
    parse_trace,
    sin,
    solve,
    sqrt,
    tan,
)


def parse(text):
    return System.parse(text)


def prove(system, **kwargs):
    """Solve and return the trace; raises ValueError unless it is unsat."""
    trace = solve(system, **kwargs)
    if trace.verdict != "unsat":
        raise ValueError(f"not unsat: {trace.verdict}")
    return trace


__all__ = [
    "Interval", "ParseError", "System", "Trace", "TraceFormatError", "TraceRejected",
    "atan", "atan2", "bench_csv", "branch_and_prove", "check", "cos", "exp", "format_hex",
    "log", "parse", "parse_trace", "prove", "sin", "solve", "sqrt", "tan",
]
