"""Random automata and tests, and property suites built on them.

Every trial draws from ``random.Random(f"{seed}:{key}:{i}")`` so a failing
trial can be replayed on its own.  Suites only use the public verdict,
preorder and analysis operations.
"""

from __future__ import annotations

import random
import time
from dataclasses import asdict, dataclass, field

from . import analysis, fixtures, semantics, verdicts
from .algebra import COMPLEMENTARY, EMPTY_INPUT, code_as_reward, prune_success
from .dsl import emit_dsl
from .model import (IO, LTS, SUCCESS, Automaton, FiniteExecution, LassoExecution, LassoWord,
                    check, is_execution)
from .preorders import (fair_preorder, may_preorder, quiescent_preorder, reward_separates,
                        trace_preorder, must_f_preorder)

SUITES = ("thm5_1", "thm6_4", "thm8_1", "thm9_3", "eq_1_2", "projections",
          "fair_completion", "fig1", "sec6", "semantics")

TEST_REGIMES = (verdicts.STRONG_REGIME, EMPTY_INPUT, COMPLEMENTARY)


@dataclass
class GenParams:
    max_states: int = 5
    inputs: int = 2
    outputs: int = 2
    internals: int = 1
    density: float = 0.35
    tasks: str = "singleton"
    seed: int = 0
    ensure: str = "none"
    test_states: int = 4

    def __post_init__(self):
        if not 0 < self.density <= 1:
            raise ValueError("density must lie in (0, 1]")
        if self.tasks not in ("singleton", "random"):
            raise ValueError("tasks must be 'singleton' or 'random'")
        if self.ensure not in ("none", "strongly-convergent", "finitely-branching"):
            raise ValueError("unknown ensure option %r" % self.ensure)


@dataclass
class SuiteResult:
    name: str
    trials: int
    seed: int
    failures: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    runtime: float = 0.0

    @property
    def ok(self):
        return not self.failures

    def count(self, key, n=1):
        self.stats[key] = self.stats.get(key, 0) + n

    def fail(self, trial, stage, detail="", automata=()):
        self.failures.append({
            "trial": trial, "seed": self.seed, "stage": stage, "detail": str(detail),
            "automata": [emit_dsl(a) for a in automata],
        })

    def to_dict(self):
        d = asdict(self)
        d["ok"] = self.ok
        return d


# -- generation ------------------------------------------------------------


def _rng(p, rng):
    return rng if rng is not None else random.Random(p.seed)


def random_signature(p: GenParams, rng=None):
    rng = _rng(p, rng)
    ins = ["i%d" % k for k in range(rng.randint(0, p.inputs))]
    outs = ["o%d" % k for k in range(rng.randint(1, max(1, p.outputs)))]
    hid = ["h%d" % k for k in range(rng.randint(0, p.internals))]
    return ins, outs, hid


def _tasks(local, mode, rng):
    local = sorted(local)
    if mode == "singleton" or len(local) < 2:
        return {a: [a] for a in local}
    blocks = {}
    for a in local:
        blocks.setdefault("t%d" % rng.randrange(len(local)), []).append(a)
    return blocks


def _forward_only(trans, internals, order):
    return [(s, a, t) for s, a, t in trans if a not in internals or order[t] > order[s]]


def random_io_automaton(p: GenParams, rng=None, name="A", signature=None) -> Automaton:
    """A random input-enabled automaton over ``signature`` (drawn if omitted)."""
    rng = _rng(p, rng)
    ins, outs, hid = signature or random_signature(p, rng)
    n = rng.randint(1, p.max_states)
    states = ["s%d" % k for k in range(n)]
    trans = set()
    for s in states:
        for a in ins:
            if rng.random() < p.density:
                trans.add((s, a, rng.choice(states)))
                if rng.random() < p.density / 2:
                    trans.add((s, a, rng.choice(states)))
            else:
                trans.add((s, a, s))
        for a in outs + hid:
            if rng.random() < p.density:
                trans.add((s, a, rng.choice(states)))
                if rng.random() < p.density / 3:
                    trans.add((s, a, rng.choice(states)))
    trans = sorted(trans)
    if p.ensure == "strongly-convergent":
        trans = _forward_only(trans, set(hid), {s: k for k, s in enumerate(states)})
    a = Automaton(name=name, kind=IO, inputs=ins, outputs=outs, internals=hid,
                  states=states, starts=[states[0]], transitions=trans,
                  tasks=_tasks(outs + hid, p.tasks, rng))
    if p.ensure == "strongly-convergent":
        assert analysis.is_strongly_convergent(a)
    return a


def _test_automaton(rng, n, inputs, outputs, internals, density, tasks_mode, kind=IO,
                    rewards=False, name="T"):
    states = ["t%d" % k for k in range(n)]
    trans = set()
    for s in states:
        for a in sorted(inputs):
            trans.add((s, a, rng.choice(states) if rng.random() < density else s))
        for a in sorted(set(outputs) | set(internals)):
            if rng.random() < (density if a != SUCCESS else 0.3):
                trans.add((s, a, rng.choice(states)))
    rew = {}
    if rewards:
        for tr in sorted(trans):
            if rng.random() < 0.4:
                rew[tr] = float(rng.choice((-1, 1, 2)))
    local = set(outputs) | set(internals)
    test = Automaton(name=name, kind=kind, inputs=inputs, outputs=outputs, internals=internals,
                     states=states, starts=[states[0]], transitions=trans,
                     tasks=_tasks(local, tasks_mode, rng) if kind == IO else {},
                     rewards=rew)
    assert not check(test), check(test)
    return test


def random_test(p: GenParams, signature, regime, rng=None, rewards=False) -> Automaton:
    """A random test admissible for automata of ``signature`` under ``regime``."""
    rng = _rng(p, rng)
    regime = verdicts.regime_name(regime)
    ins, outs, hid = (sorted(x) for x in signature[:3])
    n = rng.randint(1, p.test_states)
    internals = ["u0"] if rng.random() < 0.5 else []
    if regime == verdicts.LTS_REGIME:
        ext = [a for a in ins + outs if rng.random() < 0.7] + [SUCCESS]
        return _test_automaton(rng, n, [], ext, internals, p.density, p.tasks, kind=LTS,
                               rewards=rewards)
    if regime == COMPLEMENTARY:
        t_in, t_out = outs, ins + [SUCCESS]
    elif regime == EMPTY_INPUT:
        t_in = [a for a in outs if rng.random() < 0.7]
        t_out = ins + [SUCCESS]
    else:
        t_in = [a for a in outs if rng.random() < 0.7] + (["x0"] if rng.random() < 0.3 else [])
        t_out = [a for a in ins if rng.random() < 0.7] + [SUCCESS] + \
            (["y0"] if rng.random() < 0.3 else [])
    return _test_automaton(rng, n, t_in, t_out, internals, p.density, "singleton"
                           if regime == COMPLEMENTARY else p.tasks, rewards=rewards)


def _mutate(a: Automaton, rng, name="B"):
    trans = set(a.transitions)
    local = sorted(a.local)
    op = rng.choice(("add", "remove", "redirect", "redirect"))
    if op == "add" and local:
        trans.add((rng.choice(a.states), rng.choice(local), rng.choice(a.states)))
    else:
        cand = sorted(trans)
        if cand:
            s, act, t = rng.choice(cand)
            trans.discard((s, act, t))
            if op == "redirect" or (act in a.inputs and not any(
                    x == s and b == act for x, b, _ in trans)):
                trans.add((s, act, rng.choice(a.states)))
    return a.replace(name=name, transitions=trans, rewards={})


def _split_state(a: Automaton, rng, name="B"):
    """Copy one state; redirect some of its incoming transitions to the copy."""
    s = rng.choice(sorted(a.states))
    twin = s + "x"
    while twin in a.states:
        twin += "x"
    trans = set(a.transitions)
    trans.update((twin, act, t if t != s else twin) for x, act, t in a.transitions if x == s)
    for x, act, t in sorted(a.transitions):
        if t == s and rng.random() < 0.5:
            trans.discard((x, act, t))
            trans.add((x, act, twin))
            if x == s:
                trans.add((twin, act, twin))
    return a.replace(name=name, states=list(a.states) + [twin], transitions=trans)


def random_pair(p: GenParams, rng=None):
    """Two automata with equal signature: independent, mutated or equivalent."""
    rng = _rng(p, rng)
    sig = random_signature(p, rng)
    a = random_io_automaton(p, rng, "A", sig)
    style = rng.choice(("independent", "mutated", "mutated", "equivalent"))
    if style == "independent":
        b = random_io_automaton(p, rng, "B", sig)
    elif style == "mutated":
        b = _mutate(a, rng)
    else:
        b = _split_state(a, rng)
    if rng.random() < 0.5:
        a, b = b.replace(name="A"), a.replace(name="B")
    return a, b


def _trial_rng(seed, key, i):
    return random.Random("%s:%s:%d" % (seed, key, i))


# -- suites ----------------------------------------------------------------


def _suite_thm5_1(res, p, i, rng):
    a, b = random_pair(p, _trial_rng(res.seed, "pair", i))
    rep = may_preorder(a, b)
    if rep.holds != trace_preorder(b, a).holds:
        return res.fail(i, "may-vs-trace", "", (a, b))
    if not rep.holds:
        res.count("distinguished")
        if not rep.verified:
            res.fail(i, "may-witness", rep.verification, (a, b, rep.witness_test))
        return
    res.count("related")
    for k in range(20):
        t = random_test(p, a.signature, verdicts.STRONG_REGIME, rng)
        if verdicts.may(a, t, verdicts.STRONG_REGIME) and not verdicts.may(b, t, verdicts.STRONG_REGIME):
            return res.fail(i, "sampled-may-test", "test %d" % k, (a, b, t))


def _must_pair(res, p, i):
    a, b = random_pair(p, _trial_rng(res.seed, "pair", i))
    return a, b, must_f_preorder(a, b, mode="exact")


def _suite_thm8_1(res, p, i, rng):
    a, b, rep = _must_pair(res, p, i)
    if not rep.holds:
        res.count("lasso-witness" if isinstance(rep.counterexample, LassoWord) else "finite-witness")
        if not rep.verified:
            res.fail(i, "must-witness", rep.verification, (a, b, rep.witness_test))
        return
    if rep.completeness != "exact":
        res.count("inconclusive")
        return
    res.count("related")
    for k in range(20):
        regime = TEST_REGIMES[k % 3]
        t = random_test(p, a.signature, regime, rng)
        for verdict in (verdicts.must_f, verdicts.must_f_ab):
            if verdict(a, t, regime) and not verdict(b, t, regime):
                return res.fail(i, "sampled-%s" % verdict.__name__, "%s test %d" % (regime, k),
                                (a, b, t))


def _fair_executions(p, limit, cap):
    """Fair finite executions and fair lassos of ``p`` with at most ``limit`` steps."""
    out = []
    stack = [(s, (s,), ()) for s in sorted(p.starts)]
    while stack and len(out) < cap:
        cur, states, acts = stack.pop()
        ex = FiniteExecution(states, acts)
        if p.is_quiescent(cur):
            out.append(ex)
        for k, s in enumerate(states[:-1]):
            if s == cur:
                lasso = LassoExecution(FiniteExecution(states[:k + 1], acts[:k]),
                                       FiniteExecution(states[k:], acts[k:]))
                if semantics.is_fair_lasso(p, lasso):
                    out.append(lasso)
        if len(acts) < limit:
            for a, t in reversed(p.successors(cur)):
                stack.append((t, states + (t,), acts + (a,)))
    return out


def _suite_thm9_3(res, p, i, rng):
    a, b, rep = _must_pair(res, p, i)
    if not rep.holds:
        if rep.witness_test is None:
            return
        res.count("coded-witness")
        sep, ra, rb = reward_separates(a, b, code_as_reward(rep.witness_test))
        if not sep:
            res.fail(i, "reward-separation", (ra.to_dict(), rb.to_dict()),
                     (a, b, rep.witness_test))
        return
    if rep.completeness != "exact":
        return
    res.count("related")
    for k in range(10):
        t = random_test(p, a.signature, verdicts.STRONG_REGIME, rng, rewards=True)
        ra = verdicts.min_fair_reward(a, t)
        pb = verdicts.product(b, t, verdicts.STRONG_REGIME)
        betas = _fair_executions(pb, 6, 300)
        rb = verdicts.min_fair_reward(b, t)
        if rb.witness is not None:
            betas.append(rb.witness)
        for beta in betas:
            res.count("betas")
            if not ra.admits(semantics.reward_of(pb, beta)):
                return res.fail(i, "forall-beta-exists-alpha",
                                "beta %s reward %s; min over A %s" % (
                                    beta.to_dict(), semantics.reward_of(pb, beta), ra.to_dict()),
                                (a, b, t))
        if not rb.attained and rb.value == float("-inf") and ra.value > rb.value:
            return res.fail(i, "unattained-infimum", (ra.to_dict(), rb.to_dict()), (a, b, t))


def _suite_eq_1_2(res, p, i, rng):
    sig = random_signature(p, rng)
    c = random_io_automaton(p, rng, "C", sig)
    regime = TEST_REGIMES[i % 3]
    t = random_test(p, c.signature, regime, rng)
    pruned = prune_success(t)
    m, mp = verdicts.must_f(c, t, regime), verdicts.must_f(c, pruned, regime)
    mab = verdicts.must_f_ab(c, pruned, regime)
    res.count("must" if m else "not-must")
    if m.holds != mp.holds:
        res.fail(i, "eq1", (m.holds, mp.holds), (c, t))
    elif mp.holds != mab.holds:
        res.fail(i, "eq2", (mp.holds, mab.holds), (c, t))


def _random_fair_execution(comp, rng):
    reach = sorted(comp.reachable())
    for _ in range(20):
        s = rng.choice(reach)
        avoid = {x for x in reach if x != s and rng.random() < 0.3}
        kinds = ("lasso",) if rng.random() < 0.8 else ("finite", "lasso")
        wit = analysis.fair_emptiness(comp, avoid_states=avoid, starts=[s], kinds=kinds)
        if wit is None:
            continue
        adj = {v: list(comp.successors(v)) for v in reach}
        start, steps = analysis.bfs_path(comp.starts, adj, lambda v: v == s)
        stem = FiniteExecution.from_steps(start, steps)
        ex = wit.execution
        if isinstance(ex, LassoExecution):
            return LassoExecution(stem.then(ex.stem), ex.loop)
        return stem.then(ex)
    return None


def _suite_projections(res, p, i, rng):
    sig = random_signature(p, rng)
    a = random_io_automaton(p, rng, "A", sig)
    t = random_test(p, a.signature, TEST_REGIMES[i % 3], rng, rewards=True)
    comp = verdicts.product(a, t, verdicts.STRONG_REGIME)
    ex = _random_fair_execution(comp, rng)
    if ex is None:
        res.count("no-fair-execution")
        return
    res.count("lasso" if isinstance(ex, LassoExecution) else "finite")
    if not (is_execution(comp, ex) and semantics.is_fair(comp, ex)):
        return res.fail(i, "sample", ex.to_dict(), (a, t))
    word = semantics.trace(comp, ex)
    for k, part in ((1, t), (2, a)):
        proj = semantics.project(comp, ex, k)
        if not is_execution(part, proj):
            return res.fail(i, "projection-%d-not-execution" % k, ex.to_dict(), (a, t))
        if not semantics.is_fair(part, proj):
            return res.fail(i, "projection-%d-unfair" % k, ex.to_dict(), (a, t))
        if semantics.trace(part, proj) != semantics.restrict_word(comp, word, k):
            return res.fail(i, "trace-restrict-%d" % k, ex.to_dict(), (a, t))
    if semantics.reward_of(comp, ex) != semantics.reward_of(t, semantics.project(comp, ex, 1)):
        res.fail(i, "reward-projection", ex.to_dict(), (a, t))


def _suite_fair_completion(res, p, i, rng):
    a = random_io_automaton(p, rng, "A")
    for s in sorted(a.reachable()):
        wit = analysis.fair_emptiness(a, starts=[s])
        if wit is None:
            return res.fail(i, "no-completion", s, (a,))
        ex = wit.execution
        first = ex.stem.first if isinstance(ex, LassoExecution) else ex.first
        if first != s or not is_execution(a, ex, from_start=False) or not semantics.is_fair(a, ex):
            return res.fail(i, "bad-completion", ex.to_dict(), (a,))
        res.count("states")


def _suite_thm6_4(res, p, i, rng):
    q = GenParams(**{**asdict(p), "ensure": "strongly-convergent"})
    a, b = random_pair(q, _trial_rng(res.seed, "pair", i))
    if not (analysis.is_strongly_convergent(a) and analysis.is_strongly_convergent(b)):
        res.count("skipped-divergent")
        return
    rq = quiescent_preorder(a, b)
    if fair_preorder(a, b, mode="exact").holds and not rq.holds:
        return res.fail(i, "fair-implies-quiescent", rq.counterexample, (a, b))
    if not rq.holds:
        res.count("flagged")
        return
    res.count("related")
    for k in range(20):
        t = random_test(p, a.signature, COMPLEMENTARY, rng)
        if verdicts.must_pr(a, t) and not verdicts.must_pr(b, t):
            return res.fail(i, "sampled-must-pr", "test %d" % k, (a, b, t))


def _suite_fig1(res, p, i, rng):
    a, b, t = fixtures.fig1()
    lts = verdicts.LTS_REGIME
    va, vb = verdicts.must_pr(a, t, lts), verdicts.must_pr(b, t, lts)
    if not va.holds or vb.holds or vb.note != "deadlock before success":
        res.fail(i, "must-lts", (va.to_dict(), vb.to_dict()), (a, b, t))
    if verdicts.admissible(a, b, t, verdicts.STRONG_REGIME).ok:
        res.fail(i, "strong-admissibility", "T accepted", (a, b, t))
    for x, y in ((a, b), (b, a)):
        if not quiescent_preorder(x, y).holds:
            res.fail(i, "quiescent-equivalence", x.name, (a, b))
    for x in (a, b):
        tl = set(analysis.trace_language(x).words(3))
        ql = set(analysis.quiescent_language(x).words(3))
        if tl != {(), ("a",), ("b",)} or ql != {("a",), ("b",)}:
            res.fail(i, "languages", (sorted(tl), sorted(ql)), (x,))
        if not (analysis.is_strongly_convergent(x) and analysis.is_finitely_branching(x)):
            res.fail(i, "preconditions", x.name, (x,))


def _suite_sec6(res, p, i, rng):
    a, b, t = fixtures.sec6()
    for x, y in ((a, b), (b, a)):
        r = fair_preorder(x, y, mode="exact")
        if not r.holds or r.completeness != "exact":
            res.fail(i, "fair-equivalence", r.to_dict(), (x, y))
    for x in (a, b):
        if analysis.finite_fairtrace_language(x).words(2) != [()]:
            res.fail(i, "fair-traces", x.name, (x,))
    if not verdicts.admissible(a, b, t, COMPLEMENTARY).ok:
        res.fail(i, "test-not-complementary", "", (t,))
    va, vb = verdicts.must_pr(a, t), verdicts.must_pr(b, t)
    if not va.holds or vb.holds:
        res.fail(i, "must-pr", (va.to_dict(), vb.to_dict()), (a, b, t))
    q = quiescent_preorder(a, b)
    if not q.holds or not any(f.startswith("divergence") for f in q.flags):
        res.fail(i, "quiescent-flag", q.to_dict(), (a, b))


# -- brute-force semantics oracle ------------------------------------------


def _oracle_fair_finite(a, states, actions):
    """Direct check: no suffix keeps a task enabled without taking it."""
    for j in range(len(states)):
        for acts in a.tasks.values():
            if all(acts & a.enabled(s) for s in states[j:]) and not acts & set(actions[j:]):
                return False
    return True


def _oracle_fair_lasso(a, stem_states, stem_actions, loop_states, loop_actions):
    # unroll twice; every infinite suffix starts within stem + one period and
    # from there on sees every loop position, so the unrolled tail suffices
    states = list(stem_states[:-1]) + list(loop_states[:-1]) * 2
    actions = list(stem_actions) + list(loop_actions) * 2
    horizon = len(stem_states) - 1 + len(loop_states) - 1
    for j in range(horizon + 1):
        for acts in a.tasks.values():
            if all(acts & a.enabled(s) for s in states[j:]) and not acts & set(actions[j:]):
                return False
    return True


def _enumerate(a, limit, starts=None, allowed=lambda s: True):
    finite, lassos = [], []
    stack = [((s,), ()) for s in sorted(starts or a.starts) if allowed(s)]
    while stack:
        states, acts = stack.pop()
        finite.append((states, acts))
        for k in range(len(states) - 1):
            if states[k] == states[-1]:
                lassos.append((states[:k + 1], acts[:k], states[k:], acts[k:]))
        if len(acts) < limit:
            for x, t in a.successors(states[-1]):
                if allowed(t):
                    stack.append((states + (t,), acts + (x,)))
    return finite, lassos


def _suite_semantics(res, p, i, rng):
    q = GenParams(**{**asdict(p), "max_states": min(p.max_states, 4),
                     "tasks": "random" if i % 2 else "singleton"})
    a = random_io_automaton(q, rng, "A")
    finite, lassos = _enumerate(a, 6)
    fin_lang = analysis.finite_fairtrace_language(a)
    for states, acts in finite:
        ex = FiniteExecution(states, acts)
        if semantics.is_fair_finite(a, ex) != _oracle_fair_finite(a, states, acts):
            return res.fail(i, "finite-fairness", ex.to_dict(), (a,))
        if semantics.is_fair_finite(a, ex) and not fin_lang.accepts(semantics.trace(a, ex)):
            return res.fail(i, "finite-fairtrace", ex.to_dict(), (a,))
    for ss, sa, ls, la in lassos:
        if len(sa) + len(la) > 6:
            continue
        lasso = LassoExecution(FiniteExecution(ss, sa), FiniteExecution(ls, la))
        fair = semantics.is_fair_lasso(a, lasso)
        if fair != _oracle_fair_lasso(a, ss, sa, ls, la):
            return res.fail(i, "lasso-fairness", lasso.to_dict(), (a,))
        if fair:
            w = semantics.trace(a, lasso)
            ok = (analysis.lasso_fairtrace_membership(a, w)[0] if isinstance(w, LassoWord)
                  else fin_lang.accepts(w))
            if not ok:
                return res.fail(i, "lasso-fairtrace", lasso.to_dict(), (a,))
        res.count("lassos")
    res.count("finite", len(finite))

    # emptiness on random avoid sets, against the brute-force search
    for _ in range(3):
        avoid = {s for s in a.states if rng.random() < 0.3}
        fin, las = _enumerate(a, 6, allowed=lambda s: s not in avoid)
        brute = any(_oracle_fair_finite(a, *f) for f in fin) or any(
            len(x[1]) + len(x[3]) <= 6 and _oracle_fair_lasso(a, *x) for x in las)
        wit = analysis.fair_emptiness(a, avoid_states=avoid)
        if wit is None:
            if brute:
                return res.fail(i, "emptiness-missed", sorted(avoid), (a,))
            continue
        ex = wit.execution
        seen = list(ex.stem.states + ex.loop.states) if isinstance(ex, LassoExecution) else list(ex.states)
        if not (is_execution(a, ex) and semantics.is_fair(a, ex)) or avoid & set(seen):
            return res.fail(i, "emptiness-witness", ex.to_dict(), (a,))
        if isinstance(ex, LassoExecution):
            ok = _oracle_fair_lasso(a, ex.stem.states, ex.stem.actions, ex.loop.states, ex.loop.actions)
        else:
            ok = _oracle_fair_finite(a, ex.states, ex.actions)
        if not ok:
            return res.fail(i, "emptiness-witness-oracle", ex.to_dict(), (a,))


_RUNNERS = {
    "thm5_1": _suite_thm5_1,
    "thm6_4": _suite_thm6_4,
    "thm8_1": _suite_thm8_1,
    "thm9_3": _suite_thm9_3,
    "eq_1_2": _suite_eq_1_2,
    "projections": _suite_projections,
    "fair_completion": _suite_fair_completion,
    "fig1": _suite_fig1,
    "sec6": _suite_sec6,
    "semantics": _suite_semantics,
}


def run_suite(name: str, trials: int, seed: int = 0, params: GenParams = None) -> SuiteResult:
    if name not in _RUNNERS:
        raise ValueError("unknown suite %r; choose from %s" % (name, ", ".join(SUITES)))
    params = params or GenParams(seed=seed)
    res = SuiteResult(name, trials, seed)
    began = time.perf_counter()
    for i in range(trials):
        _RUNNERS[name](res, params, i, _trial_rng(seed, name, i))
    res.runtime = time.perf_counter() - began
    return res
