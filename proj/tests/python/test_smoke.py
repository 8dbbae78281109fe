import math
import os
import pathlib
import random

import pytest

import dproof

CORPUS = pathlib.Path(os.environ.get("DPROOF_CORPUS_DIR",
                                     pathlib.Path(__file__).resolve().parents[2] / "corpus"))

EX1 = """
(declare-fun x () Real)
(declare-fun y () Real)
(assert (<= 1.5 x))
(assert (<= x 2))
(assert (<= 1 y))
(assert (<= y 2))
(assert (= y x))
(assert (= y (^ x 2)))
"""


def test_interval_ops_enclose_samples():
    rng = random.Random(3)
    a = dproof.Interval(-1.5, 2.0)
    b = dproof.Interval(0.25, 3.0)
    prod, quo, s = a * b, a / b, dproof.sin(a)
    for _ in range(1000):
        x, y = rng.uniform(-1.5, 2.0), rng.uniform(0.25, 3.0)
        assert prod.contains(x * y)
        assert quo.contains(x / y)
        assert s.contains(math.sin(x))
    assert (dproof.Interval(-2, 1) ** 2) == dproof.Interval(0, 4)
    assert dproof.sqrt(dproof.Interval(-4, -1)).is_empty()


def test_parse_and_round_trip():
    s = dproof.parse(EX1)
    assert len(s) == 2
    assert s.variables[0] == ("x", (1.5, 2.0))
    assert s.arith_count() == 3
    assert dproof.parse(s.canonical_text()) == s
    assert len(s.digest()) == 64
    with pytest.raises(dproof.ParseError):
        dproof.parse("(assert (<= x 1)")


def test_prove_and_check():
    s = dproof.parse(EX1)
    t = dproof.prove(s)
    assert t.verdict == "unsat"
    text = t.serialize()
    back = dproof.parse_trace(text)
    r = dproof.check(back)
    assert r["verdict"] == "valid"
    assert r["axioms"] == 3
    assert "valid, 3 axioms" in r["text"]


def test_hand_written_trace():
    text = (CORPUS / "proofs" / "example1_by_hand.dproof").read_text()
    r = dproof.check(dproof.parse_trace(text))
    assert (r["verdict"], r["axioms"]) == ("valid", 7)
    with pytest.raises(dproof.TraceFormatError):
        dproof.parse_trace(text.replace("dproof", "dpr00f", 1))


def test_delta_sat_witness():
    s = dproof.parse("(declare-fun x () Real)(assert (<= 0 x))(assert (<= x 1))(assert (> x 0.5))")
    t = dproof.solve(s)
    assert t.verdict == "delta-sat"
    (lo, hi), = t.witness
    assert 0 <= lo <= hi <= 1 and hi > 0.5
    with pytest.raises(ValueError):
        dproof.prove(s)


def test_branch_and_prove():
    dep = dproof.parse("(declare-fun x () Real)(assert (<= 0 x))(assert (<= x 1))"
                       "(assert (>= (- x x) 0.1))")
    natural = dproof.branch_and_prove(dep, use_taylor=False)
    assert natural["status"] == "proved" and natural["rounds"] >= 2
    assert dproof.branch_and_prove(dep)["rounds"] == 1
    sat = dproof.parse("(declare-fun x () Real)(assert (<= -2 x))(assert (<= x 2))"
                       "(assert (<= (* x x) 1))")
    out = dproof.branch_and_prove(sat)
    assert out["status"] == "disproved"
    assert sat.is_satisfied_at(out["witness"])


def test_bench_csv():
    paths = [str(CORPUS / "example1.smt2"), str(CORPUS / "missing.smt2")]
    csv = dproof.bench_csv(paths, timing=False)
    lines = csv.splitlines()
    assert lines[0] == "ID,#Var,#Arith,verdict,Time_S,ProofSize,#Sub,#Axiom,Time_PC"
    assert lines[1] == "example1,2,3,proved,-,5,0,3,-"
    assert lines[2].split(",")[3] == "error"
