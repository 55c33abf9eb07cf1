"""Acceptance run: one line per criterion, suites at their full case counts.

Run with ``pytest tests/test_acceptance.py -s`` or directly as a script.
"""
import io
import sys
import time
from contextlib import redirect_stdout

import pytest

from bcadual.cli.main import main
from bcadual.intensify import intensify_tlf
from bcadual.parsing import parse_descriptor
from bcadual.suites import A1_EXPECTED, A1_FORMS, a1_residue_functional, run_suite

# (criterion, title, suites, cases per suite, time limit in seconds)
CRITERIA = [
    (1, "integration by parts", ["integration-by-parts"], 200, 5),
    (2, "residue of a Lie derivative vanishes", ["residue-of-lie"], 200, 2),
    (3, "Cartan calculus", ["cartan-calculus"], 100, 5),
    (4, "Weyl normal ordering", ["weyl-normal-ordering"], 200, 3),
    (5, "change of coefficient field",
     ["psi-inverse", "psi-basis-independence", "dij-triangular"], 100, 10),
    (6, "Matlis duality at finite length", ["matlis-duality"], 50, 5),
    (7, "trace transitivity and nondegeneracy",
     ["trace-transitivity", "trace-nondegeneracy", "trace-sigma-independence"], 50, 10),
    (8, "base-change squares",
     ["psi-square", "trace-square", "q-composite", "associativity"], 50, 10),
    (9, "dual operators",
     ["dual-do-transitivity", "dual-do-linearity", "dual-do-adjoint", "dual-do-double-dual"], 100, 10),
    (10, "de Rham duals", ["derham-duals"], 20, 10),
]

A1_PINNED = """\
X = A^1 over Q: generic point Q(t), local field Q((t)) at t = 0, closed point Q[t]/(t^n)
q expands a form of Q(t) into Q((t)) (window 12); Tr pairs it with t^k through the residue
  dt/t     -> <t^0> = 1, <t^1> = 0, <t^2> = 0, <t^3> = 0
  dt       -> <t^0> = 0, <t^1> = 0, <t^2> = 0, <t^3> = 0
  dt/t^2   -> <t^0> = 0, <t^1> = 1, <t^2> = 0, <t^3> = 0
"""


def _line(number, title, ok, detail, elapsed, limit):
    verdict = "PASS" if ok and elapsed < limit else "FAIL"
    return f"criterion {number:>2}: {verdict}  {title} ({detail}, {elapsed:.2f}s of {limit}s)"


def run_criterion(number, title, suites, cases, limit):
    start = time.perf_counter()
    reports = [run_suite(name, seed=0, cases=cases, window=12) for name in suites]
    elapsed = time.perf_counter() - start
    ok = all(r["ok"] for r in reports)
    detail = ", ".join(f"{r['suite']} {r['passed']}/{r['cases']}" for r in reports)
    return ok, elapsed, _line(number, title, ok, detail, elapsed, limit), reports


def run_descriptor_criterion():
    start = time.perf_counter()
    got = intensify_tlf(parse_descriptor("Q(s)((t))"), "s")
    # Q((s))((t)) prints compactly as Q((t,s)): t outermost, both Laurent
    ok = got == parse_descriptor("Q((s))((t))") and got.all_vars == ("t", "s")
    elapsed = time.perf_counter() - start
    return ok, elapsed, _line(11, "intensification of k(s)((t))", ok, str(got), elapsed, 1)


def run_demo_criterion():
    start = time.perf_counter()
    values = {f: a1_residue_functional(f) for f in A1_FORMS}
    buffer = io.StringIO()
    with redirect_stdout(buffer):
        code = main(["demo", "a1-residue"])
    # dt/t is dual to 1, dt is the zero functional
    ok = (code == 0 and values == A1_EXPECTED and values["dt/t"][0] == 1
          and not any(values["dt"]) and buffer.getvalue() == A1_PINNED)
    elapsed = time.perf_counter() - start
    return ok, elapsed, _line(12, "A^1 residue demo", ok, "pinned output", elapsed, 1)


def _report(capsys, line):
    with capsys.disabled():
        print("\n" + line)


@pytest.mark.parametrize("number, title, suites, cases, limit", CRITERIA, ids=[f"criterion-{c[0]}" for c in CRITERIA])
def test_criterion(number, title, suites, cases, limit, capsys):
    ok, elapsed, line, reports = run_criterion(number, title, suites, cases, limit)
    _report(capsys, line)
    failures = [(r["suite"], x) for r in reports for x in r["results"] if x["verdict"] == "fail"]
    assert ok, failures[:3]
    assert elapsed < limit


def test_criterion_11(capsys):
    ok, elapsed, line = run_descriptor_criterion()
    _report(capsys, line)
    assert ok and elapsed < 1


def test_criterion_12(capsys):
    ok, elapsed, line = run_demo_criterion()
    _report(capsys, line)
    assert ok and elapsed < 1


if __name__ == "__main__":
    lines = [run_criterion(*c)[2] for c in CRITERIA]
    lines += [run_descriptor_criterion()[2], run_demo_criterion()[2]]
    print("\n".join(lines))
    sys.exit(0 if all(": PASS" in line for line in lines) else 1)
