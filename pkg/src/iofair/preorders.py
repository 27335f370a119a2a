"""Preorder decisions and distinguishing-test synthesis.

``X_preorder(a, b)`` decides ``a ⊑_X b``: ``b`` is the implementation and
``a`` the specification.  Testing preorders are decided through their
characterisations (may by the reversed trace preorder, fair must and fair
reward by the fair preorder); when one fails, a distinguishing test is
built and re-checked with the public verdict functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import analysis, verdicts
from .algebra import code_as_reward, prune_success
from .model import IO, SUCCESS, Automaton, LassoWord, Signature, format_word, word_to_dict


class SignatureMismatch(ValueError):
    pass


@dataclass
class PreorderReport:
    relation: str
    signature_ok: bool
    holds: bool
    counterexample: object = None
    witness_test: Automaton = None
    completeness: str = "exact"
    flags: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    verification: dict = None

    @property
    def verified(self):
        return self.verification is None or self.verification.get("ok", False)

    def to_dict(self):
        from .dsl import emit_dsl
        return {
            "relation": self.relation,
            "signature_ok": self.signature_ok,
            "holds": self.holds,
            "counterexample": None if self.counterexample is None else word_to_dict(self.counterexample),
            "counterexample_text": None if self.counterexample is None else format_word(self.counterexample),
            "witness_test": None if self.witness_test is None else emit_dsl(self.witness_test),
            "completeness": self.completeness,
            "flags": list(self.flags),
            "warnings": list(self.warnings),
            "verification": self.verification,
        }


def same_signature(a: Automaton, b: Automaton) -> bool:
    if a.is_io() and b.is_io():
        return a.inputs == b.inputs and a.outputs == b.outputs
    return a.external == b.external


def _mismatch(relation):
    return PreorderReport(relation, False, False, flags=["signature mismatch"])


# -- witness tests ---------------------------------------------------------


def _sig(sig):
    if isinstance(sig, Automaton):
        return sig.signature
    return Signature(frozenset(sig[0]), frozenset(sig[1]),
                     frozenset(sig[2]) if len(sig) > 2 else frozenset())


def _fresh(base, taken):
    name = base
    while name in taken:
        name += "_"
    return name


def _check_word(letters, sig):
    bad = set(letters) - sig.external
    if bad:
        raise SignatureMismatch("letters %s are not external actions" % sorted(bad))
    if SUCCESS in sig.external:
        raise SignatureMismatch("the tested automaton must not use %s" % SUCCESS)


def witness_may_test(sigma, sig, avoid=()) -> Automaton:
    """Test passed (may) by exactly the automata having ``sigma`` as a trace."""
    sig = _sig(sig)
    sigma = tuple(sigma)
    _check_word(sigma, sig)
    ins = sorted(sig.outputs)
    n = len(sigma)
    chain = ["c%d" % i for i in range(n + 1)]
    trans = []
    for i, a in enumerate(sigma):
        trans.append((chain[i], a, chain[i + 1]))
        trans.extend((chain[i], x, "S") for x in ins if x != a)
    trans.append((chain[n], SUCCESS, "E"))
    for s in (chain[n], "S", "E"):
        trans.extend((s, x, s) for x in ins)
    outputs = sorted(sig.inputs | {SUCCESS})
    return Automaton(
        name="T_may", kind=IO, inputs=ins, outputs=outputs, internals=(),
        states=chain + ["S", "E"], starts=[chain[0]], transitions=trans,
        tasks={a: [a] for a in outputs},
    )


def witness_fair_must_test(sigma, sig, avoid=()) -> Automaton:
    """Test failed (must^F) by exactly the automata having fair trace ``sigma``.

    Finite ``sigma`` ends in a terminal state ``S``; a lasso word closes the
    chain into a loop of at least two states.  Every chain state can escape
    internally to the success state ``W``; in the lasso case each chain state
    has its own escape action so that following the chain stays fair.
    """
    sig = _sig(sig)
    taken = set(sig.external | sig.internals | {SUCCESS}) | set(avoid)
    ins = sorted(sig.outputs)
    if isinstance(sigma, LassoWord):
        u, v = sigma.u, sigma.v
        _check_word(u + v, sig)
        if len(v) < 2:
            v = v * 2
        letters = u + v
        m = len(letters)
        chain = ["c%d" % i for i in range(m)]
        nxt = [chain[i + 1] for i in range(m - 1)] + [chain[len(u)]]
        escapes = [_fresh("tau%d" % i, taken) for i in range(m)]
        extra = []
    else:
        letters = tuple(sigma)
        _check_word(letters, sig)
        m = len(letters)
        chain = ["c%d" % i for i in range(m)]
        nxt = chain[1:] + ["S"]
        escapes = [_fresh("tau", taken)] * m
        extra = ["S"]
    trans = []
    for i, a in enumerate(letters):
        trans.append((chain[i], a, nxt[i]))
        trans.append((chain[i], escapes[i], "W"))
        trans.extend((chain[i], x, "W") for x in ins if x != a)
    for x in ins:
        if extra:
            trans.append(("S", x, "W"))
        trans.append(("W", x, "W"))
        trans.append(("E", x, "E"))
    trans.append(("W", SUCCESS, "E"))
    internals = sorted(set(escapes))
    outputs = sorted(sig.inputs | {SUCCESS})
    start = chain[0] if chain else "S"
    return Automaton(
        name="T_fair", kind=IO, inputs=ins, outputs=outputs, internals=internals,
        states=chain + extra + ["W", "E"], starts=[start], transitions=trans,
        tasks={a: [a] for a in outputs + internals},
    )


# -- preorders -------------------------------------------------------------


def trace_preorder(a, b) -> PreorderReport:
    """a ⊑_T b: traces(b) ⊆ traces(a)."""
    if not same_signature(a, b):
        return _mismatch("trace")
    rep = analysis.finite_trace_inclusion(a, b)
    return PreorderReport("trace", True, rep.holds, rep.counterexample)


def quiescent_preorder(a, b) -> PreorderReport:
    """a ⊑_Q b: a ⊑_T b and qtraces(b) ⊆ qtraces(a)."""
    if not same_signature(a, b):
        return _mismatch("quiescent")
    tr = analysis.finite_trace_inclusion(a, b)
    if not tr.holds:
        report = PreorderReport("quiescent", True, False, tr.counterexample)
        report.flags.append("trace inclusion fails")
    else:
        q = analysis.quiescent_trace_inclusion(a, b)
        report = PreorderReport("quiescent", True, q.holds, q.counterexample)
    conv = [analysis.is_strongly_convergent(x) for x in (a, b)]
    if not all(conv):
        report.flags.append(
            "divergence: %s not strongly convergent; quiescent traces ignore internal "
            "divergence, so the must-progress characterisation does not apply"
            % " and ".join(n for n, c in zip(("A", "B"), conv) if not c))
    return report


def fair_preorder(a, b, bound=None, mode="bounded") -> PreorderReport:
    """a ⊑_F b: fairtraces(b) ⊆ fairtraces(a)."""
    if not same_signature(a, b):
        return _mismatch("fair")
    rep = analysis.fair_trace_inclusion(a, b, bound, mode)
    return PreorderReport("fair", True, rep.holds, rep.counterexample,
                          completeness=rep.completeness, warnings=list(rep.warnings))


def _joint_sig(a, b):
    return Signature(a.inputs, a.outputs, a.internals | b.internals)


def may_preorder(a, b) -> PreorderReport:
    """a ⊑_may b, decided as b ⊑_T a."""
    if not same_signature(a, b):
        return _mismatch("may")
    rep = analysis.finite_trace_inclusion(b, a)
    report = PreorderReport("may", True, rep.holds, rep.counterexample)
    if not rep.holds:
        test = witness_may_test(rep.counterexample, _joint_sig(a, b))
        va = verdicts.may(a, test, verdicts.STRONG_REGIME)
        vb = verdicts.may(b, test, verdicts.STRONG_REGIME)
        report.witness_test = test
        report.verification = {"A may T": va.holds, "B may T": vb.holds,
                               "ok": va.holds and not vb.holds}
    return report


def _must_verification(a, b, test):
    va, vb = verdicts.must_f(a, test), verdicts.must_f(b, test)
    pruned = prune_success(test)
    wa, wb = verdicts.must_f_ab(a, pruned), verdicts.must_f_ab(b, pruned)
    return {
        "A must_F T": va.holds, "B must_F T": vb.holds,
        "A must_F_ab T*": wa.holds, "B must_F_ab T*": wb.holds,
        "ok": va.holds and not vb.holds and wa.holds and not wb.holds,
    }


def must_f_preorder(a, b, bound=None, mode="bounded") -> PreorderReport:
    """a ⊑_must^F b (every variant), decided as a ⊑_F b."""
    report = fair_preorder(a, b, bound, mode)
    report.relation = "must-f"
    if report.signature_ok and not report.holds:
        test = witness_fair_must_test(report.counterexample, _joint_sig(a, b))
        report.witness_test = test
        report.verification = _must_verification(a, b, test)
    return report


def reward_separates(a, b, reward_test):
    """Some fair β of T||b beats every fair α of T||a (reward(α) > reward(β))."""
    ra = verdicts.min_fair_reward(a, reward_test)
    rb = verdicts.min_fair_reward(b, reward_test)
    if not rb.attained:
        sep = rb.value == float("-inf") and ra.value > rb.value
    else:
        sep = not ra.admits(rb.value)
    return sep, ra, rb


def reward_f_preorder(a, b, bound=None, mode="bounded") -> PreorderReport:
    """a ⊑_reward^F b, decided as a ⊑_F b."""
    report = fair_preorder(a, b, bound, mode)
    report.relation = "reward-f"
    if report.signature_ok and not report.holds:
        test = code_as_reward(witness_fair_must_test(report.counterexample, _joint_sig(a, b)))
        sep, ra, rb = reward_separates(a, b, test)
        report.witness_test = test
        report.verification = {"min reward A": ra.to_dict()["value"],
                               "min reward B": rb.to_dict()["value"], "ok": sep}
    return report


RELATIONS = {
    "trace": trace_preorder,
    "quiescent": quiescent_preorder,
    "fair": fair_preorder,
    "may": may_preorder,
    "must-f": must_f_preorder,
    "reward-f": reward_f_preorder,
}
