"""Acceptance gate: nine criteria, each with its own runtime limit.

Run with ``pytest tests/test_acceptance.py -s`` (or ``python
tests/test_acceptance.py``) to see one PASS/FAIL line per criterion.
"""

import sys
import time

import pytest

from iofair import analysis, fixtures, harness, preorders, verdicts

TRIALS = 300
SEED = 2024


def _fig1():
    a, b, t = fixtures.fig1()
    problems = []
    va, vb = verdicts.must_pr(a, t, "lts"), verdicts.must_pr(b, t, "lts")
    if not va.holds:
        problems.append("A fails the test")
    if vb.holds or vb.note != "deadlock before success" or vb.witness is None:
        problems.append("B passes or lacks a deadlock witness")
    if verdicts.admissible(a, b, t, "strongly-compatible").ok:
        problems.append("IO test accepted under strong compatibility")
    for x, y in ((a, b), (b, a)):
        if not preorders.quiescent_preorder(x, y).holds:
            problems.append("quiescent preorder fails for %s vs %s" % (x.name, y.name))
    for x in (a, b):
        if set(analysis.trace_language(x).words(4)) != {(), ("a",), ("b",)}:
            problems.append("trace set of %s" % x.name)
        if set(analysis.quiescent_language(x).words(4)) != {("a",), ("b",)}:
            problems.append("quiescent trace set of %s" % x.name)
        if not (analysis.is_strongly_convergent(x) and analysis.is_finitely_branching(x)):
            problems.append("preconditions of %s" % x.name)
    res = harness.run_suite("fig1", 1, SEED)
    problems += [f["stage"] for f in res.failures]
    return problems, {}


def _sec6():
    a, b, t = fixtures.sec6()
    problems = []
    for x, y in ((a, b), (b, a)):
        r = preorders.fair_preorder(x, y, mode="exact")
        if not r.holds or r.completeness != "exact":
            problems.append("fair preorder %s vs %s" % (x.name, y.name))
        if analysis.finite_fairtrace_language(x).words(3) != [()]:
            problems.append("fair traces of %s" % x.name)
        if analysis.infinite_fairtrace_inclusion(a, x)[0] is not None:
            problems.append("infinite fair trace in %s" % x.name)
    if not verdicts.admissible(a, b, t, "complementary").ok:
        problems.append("test not complementary")
    if not verdicts.must_pr(a, t).holds or verdicts.must_pr(b, t).holds:
        problems.append("must-progress verdicts")
    q = preorders.quiescent_preorder(a, b)
    if not q.holds or not any(f.startswith("divergence") for f in q.flags):
        problems.append("quiescent discrepancy not flagged")
    res = harness.run_suite("sec6", 1, SEED)
    problems += [f["stage"] for f in res.failures]
    return problems, {}


def _suite(name, trials=TRIALS):
    def run():
        res = harness.run_suite(name, trials, SEED)
        return ["trial %d: %s" % (f["trial"], f["stage"]) for f in res.failures], res.stats
    return run


CRITERIA = [
    (1, "fig1 fixture: must under lts regime, inadmissible IO test, quiescent equivalence", _fig1, 1),
    (2, "sec6 fixture: fair equivalence, must-progress test, flagged quiescent discrepancy", _sec6, 1),
    (3, "may preorder vs reversed trace preorder, may-witnesses, sampled tests", _suite("thm5_1"), 60),
    (4, "fair-must preorder vs fair preorder, finite/lasso witnesses, sampled tests",
     _suite("thm8_1"), 300),
    (5, "pruning success states preserves must, state- and action-based agree",
     _suite("eq_1_2"), 60),
    (6, "projections of fair lassos: fairness, traces, rewards", _suite("projections"), 60),
    (7, "coded reward witnesses separate; sampled reward tests satisfy forall-exists",
     _suite("thm9_3"), 300),
    (8, "every reachable state has a fair completion", _suite("fair_completion", 100), 30),
    (9, "fairness predicates and emptiness agree with brute-force enumeration",
     _suite("semantics"), 60),
]


def evaluate(number):
    _, title, fn, limit = CRITERIA[number - 1]
    began = time.perf_counter()
    problems, stats = fn()
    elapsed = time.perf_counter() - began
    if elapsed >= limit:
        problems.append("runtime %.1fs exceeds %ds" % (elapsed, limit))
    status = "PASS" if not problems else "FAIL"
    line = "criterion %d %s (%.2fs / %ds) %s" % (number, status, elapsed, limit, title)
    if stats:
        line += " " + str(dict(sorted(stats.items())))
    if problems:
        line += " :: " + "; ".join(problems[:5])
    return not problems, line


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA])
def test_criterion(number, capsys):
    ok, line = evaluate(number)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(n) for n, *_ in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
