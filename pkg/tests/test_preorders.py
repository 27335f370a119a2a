import random

import pytest

from iofair import preorders as P
from iofair import verdicts as V
from iofair.algebra import is_complementary
from iofair.analysis import is_strongly_convergent
from iofair.harness import GenParams, random_pair
from iofair.model import EmptyLoop, LassoWord, check

from conftest import io


def test_fig1_trace_and_quiescent_equivalence(fig1):
    a, b, _ = fig1
    for rel in (P.trace_preorder, P.quiescent_preorder, P.may_preorder, P.must_f_preorder):
        assert rel(a, b).holds and rel(b, a).holds


def test_reflexive(fig1, sec6):
    for x in fig1[:2] + sec6[:2]:
        for rel in P.RELATIONS.values():
            rep = rel(x, x)
            assert rep.holds and rep.completeness == "exact", rel.__name__


def test_signature_mismatch(fig1, sec6):
    rep = P.trace_preorder(fig1[0], sec6[0])
    assert not rep.signature_ok and not rep.holds and "signature mismatch" in rep.flags


def test_sec6_pair(sec6):
    a, b, _ = sec6
    assert P.fair_preorder(a, b).holds and P.fair_preorder(b, a).holds
    assert P.must_f_preorder(a, b).holds and P.reward_f_preorder(b, a).holds
    q = P.quiescent_preorder(a, b)
    assert q.holds and any(f.startswith("divergence") for f in q.flags)
    assert not P.quiescent_preorder(b, a).holds


def _with_extra_trace(a):
    """Copy of ``a`` with an extra output ``c`` from the start state."""
    start = sorted(a.starts)[0]
    return a.replace(name="Ac", transitions=a.transitions | {(start, "c", start)})


def _extend_signature(a):
    return a.replace(outputs=a.outputs | {"c"}, tasks={**a.tasks, "c": {"c"}})


def test_may_witness_for_extra_trace(fig1):
    b = _extend_signature(fig1[0])
    a = _with_extra_trace(b)
    rep = P.may_preorder(a, b)
    assert not rep.holds and rep.counterexample == ("c",)
    t = rep.witness_test
    assert V.may(a, t, "strong").holds and not V.may(b, t, "strong").holds
    assert rep.verified and is_complementary(t, a.signature)


def test_may_witness_examples(fig1):
    a = fig1[0]
    eps = P.witness_may_test((), a.signature)
    assert "w" in eps.enabled(sorted(eps.starts)[0])
    assert V.may(a, eps, "strong").holds and V.may(fig1[1], eps, "strong").holds
    t = P.witness_may_test(("a",), a.signature)
    assert not check(t) and t.internals == set()
    assert V.may(a, t, "strong").holds
    with pytest.raises(P.SignatureMismatch):
        P.witness_may_test(("zz",), a.signature)


def test_fair_must_witness_finite(fig1):
    a = fig1[0]
    t = P.witness_fair_must_test(("a",), a.signature)
    assert is_complementary(t, a.signature) and not check(t)
    assert not V.must_f(a, t).holds
    c = _extend_signature(a)
    tc = P.witness_fair_must_test(("c",), c.signature)
    assert V.must_f(c, tc).holds


def test_fair_must_witness_for_empty_word(sec6):
    b = sec6[1]
    t = P.witness_fair_must_test((), b.signature)
    assert sorted(t.starts) == ["S"]
    assert not V.must_f(b, t).holds


def test_fair_must_witness_lasso():
    spec = io("S", outputs=["c"], states=["s0", "s1"], transitions=[("s0", "c", "s1")])
    impl = io("I", outputs=["c"], transitions=[("s0", "c", "s0")])
    rep = P.must_f_preorder(spec, impl)
    assert not rep.holds and isinstance(rep.counterexample, LassoWord)
    t = rep.witness_test
    assert rep.verified, rep.verification
    # one escape action per chain state, and the loop is unrolled to length 2
    assert len(t.internals) == 2 and all(len(t.tasks[x]) == 1 for x in t.internals)
    with pytest.raises(EmptyLoop):
        P.witness_fair_must_test(LassoWord((), ()), spec.signature)


def test_escape_names_avoid_clashes():
    x = io("X", outputs=["c"], internals=["tau", "tau0"], transitions=[("s0", "c", "s0")])
    t = P.witness_fair_must_test(LassoWord((), ("c",)), x.signature)
    assert not t.internals & x.internals
    f = P.witness_fair_must_test(("c",), x.signature)
    assert f.internals == {"tau_"}


def test_reward_witness():
    spec = io("S", outputs=["c"], states=["s0", "s1"], transitions=[("s0", "c", "s1")])
    impl = io("I", outputs=["c"], transitions=[("s0", "c", "s0")])
    rep = P.reward_f_preorder(spec, impl)
    assert not rep.holds and rep.verified
    assert rep.verification["min reward A"] == 1 and rep.verification["min reward B"] == 0


@pytest.mark.parametrize("seed", range(30))
def test_round_trips_on_random_pairs(seed):
    a, b = random_pair(GenParams(), random.Random("pre:%d" % seed))
    may = P.may_preorder(a, b)
    assert may.holds == P.trace_preorder(b, a).holds
    assert may.verified
    fair = P.must_f_preorder(a, b, mode="exact")
    assert fair.verified
    if fair.holds:
        assert P.trace_preorder(a, b).holds
        if is_strongly_convergent(a):
            assert P.quiescent_preorder(a, b).holds


def test_report_serialises(fig1):
    b = _extend_signature(fig1[0])
    d = P.may_preorder(_with_extra_trace(b), b).to_dict()
    assert d["counterexample"] == {"word": ["c"]} and d["witness_test"].startswith("automaton T_may")
