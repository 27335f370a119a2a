"""Testing verdicts for a concrete (automaton, test) pair."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import analysis
from .algebra import (
    COMPLEMENTARY, EMPTY_INPUT, CompatibilityReport, check_compatibility,
    check_strong_compatibility, compose, hide_for_testing, is_complementary,
    success_states,
)
from .model import IO, LTS, SUCCESS, FiniteExecution, LassoExecution
from .semantics import reward_of

LTS_REGIME = "lts-compatible"
STRONG_REGIME = "strongly-compatible"
REGIMES = (LTS_REGIME, STRONG_REGIME, EMPTY_INPUT, COMPLEMENTARY)
_ALIASES = {"lts": LTS_REGIME, "strong": STRONG_REGIME, "strongly": STRONG_REGIME}


def regime_name(regime):
    regime = _ALIASES.get(regime, regime)
    if regime not in REGIMES:
        raise ValueError("unknown regime %r" % regime)
    return regime


@dataclass
class Verdict:
    holds: bool
    witness: object = None
    note: str = ""

    def __bool__(self):
        return self.holds

    def to_dict(self):
        return {
            "holds": self.holds,
            "witness": None if self.witness is None else _execution_dict(self.witness),
            "note": self.note,
        }


def _execution_dict(ex):
    if isinstance(ex, LassoExecution):
        d = ex.to_dict()
        d["kind"] = "lasso"
        return d
    d = ex.to_dict()
    d["kind"] = "finite"
    return d


def product(system, test, regime=LTS_REGIME):
    """``test || system`` with the test as first component."""
    kind = LTS if regime_name(regime) == LTS_REGIME else IO
    return compose([test, system], kind=kind)


def _testing_view(system, test, regime):
    return hide_for_testing(product(system, test, regime))


def may(system, test, regime=LTS_REGIME) -> Verdict:
    p = _testing_view(system, test, regime)
    good = success_states(p)
    adj = {s: list(p.successors(s)) for s in p.states}
    found = analysis.bfs_path(p.starts, adj, lambda s: s in good)
    if found is None:
        return Verdict(False, note="no success state reachable")
    return Verdict(True, FiniteExecution.from_steps(*found))


def surv(system, test, regime=LTS_REGIME) -> Verdict:
    m = may(system, test, regime)
    if m.holds:
        return Verdict(False, m.witness, "failure state reachable")
    return Verdict(True)


def should(system, test, regime=LTS_REGIME) -> Verdict:
    p = _testing_view(system, test, regime)
    good = success_states(p)
    pred = {}
    for s, a, t in p.transitions:
        pred.setdefault(t, []).append(s)
    coreach = set(good)
    stack = list(good)
    while stack:
        t = stack.pop()
        for s in pred.get(t, ()):
            if s not in coreach:
                coreach.add(s)
                stack.append(s)
    adj = {s: list(p.successors(s)) for s in p.states}
    found = analysis.bfs_path(p.starts, adj, lambda s: s not in coreach)
    if found is None:
        return Verdict(True)
    return Verdict(False, FiniteExecution.from_steps(*found), "success no longer reachable")


def must_pr(system, test, regime=COMPLEMENTARY) -> Verdict:
    """Every deadlocked or infinite execution passes a success state."""
    p = _testing_view(system, test, regime)
    good = success_states(p)
    adj = analysis._restricted_graph(p.starts, p.successors, lambda s: s not in good,
                                     lambda s, a, t: True)
    starts = [s for s in p.starts if s in adj]
    found = analysis.bfs_path(starts, adj, lambda s: not p.successors(s))
    if found is not None:
        return Verdict(False, FiniteExecution.from_steps(*found), "deadlock before success")
    for comp in analysis.sccs(sorted(adj), lambda v: [w for _, w in adj[v]]):
        loop = analysis._fair_cycle(comp, adj, [])
        if loop is not None:
            root = loop[0][0]
            start, stem = analysis.bfs_path(starts, adj, lambda v: v == root)
            lasso = LassoExecution(FiniteExecution.from_steps(start, stem),
                                   FiniteExecution.from_steps(root, loop))
            return Verdict(False, lasso, "infinite execution without success")
    return Verdict(True)


def must_f(system, test, regime=STRONG_REGIME) -> Verdict:
    """Every fair execution of ``test || system`` visits a success state."""
    p = product(system, test, regime)
    good = success_states(p)
    wit = analysis.fair_emptiness(p, avoid_states=good)
    if wit is None:
        return Verdict(True)
    return Verdict(False, wit.execution, "fair execution avoiding success states")


def must_f_ab(system, test, regime=STRONG_REGIME) -> Verdict:
    """Every fair execution of ``test || system`` contains the action ``w``."""
    p = product(system, test, regime)
    wit = analysis.fair_emptiness(p, avoid_actions={SUCCESS})
    if wit is None:
        return Verdict(True)
    return Verdict(False, wit.execution, "fair execution without w")


# -- rewards ---------------------------------------------------------------


@dataclass
class RewardBound:
    """Infimum of rewards over fair executions.

    ``attained`` is false when the infimum is approached but never reached
    (unbounded finite executions, or no fair execution at all).
    """

    value: float
    attained: bool
    witness: object = None
    completeness: str = "exact"

    def admits(self, reward):
        """Some fair execution has reward at most ``reward``."""
        return self.value < reward or (self.value == reward and self.attained)

    def to_dict(self):
        return {
            "value": _num(self.value),
            "attained": self.attained,
            "witness": None if self.witness is None else _execution_dict(self.witness),
            "completeness": self.completeness,
        }


def _num(x):
    if x == math.inf:
        return "+inf"
    if x == -math.inf:
        return "-inf"
    return x


_EPS = 1e-9


def _bellman_ford(nodes, edges, sources):
    """Distances, predecessors and a node on a negative cycle (or ``None``)."""
    dist = {v: math.inf for v in nodes}
    pred = {}
    for s in sources:
        dist[s] = 0.0
    changed = None
    for _ in range(len(nodes)):
        changed = None
        for u, a, v, r in edges:
            if dist[u] + r < dist[v] - _EPS:
                dist[v] = dist[u] + r
                pred[v] = (u, a, r)
                changed = v
        if changed is None:
            return dist, pred, None
    return dist, pred, changed


def _negative_cycle(pred, node, n):
    for _ in range(n):
        node = pred[node][0]
    cycle, cur = [], node
    while True:
        u, a, _ = pred[cur]
        cycle.append((u, a, cur))
        cur = u
        if cur == node:
            break
    cycle.reverse()
    return cycle


def _tight_fair_cycle(comp, adj, dist, rewards, obligations, limit=None):
    nodes = [v for v in comp if limit is None or dist[v] <= limit + _EPS]
    keep = set(nodes)
    tight = {v: [(a, w) for a, w in adj[v] if w in keep
                 and abs(dist[v] + rewards.get((v, a, w), 0.0) - dist[w]) <= _EPS]
             for v in nodes}
    for sub in analysis.sccs(sorted(nodes), lambda v: [w for _, w in tight[v]]):
        loop = analysis._fair_cycle(sub, tight, obligations)
        if loop is not None:
            return loop
    return None


def min_fair_reward(system, test, bound=None) -> RewardBound:
    """Infimum of ``reward(α)`` over fair executions α of ``test || system``.

    Exact: fair lassos with a negative loop give an attained -inf; a negative
    cycle from which a quiescent state or a zero-sum fair cycle is reachable
    gives an unattained -inf; otherwise shortest-path distances settle finite
    executions and zero-sum loops, whose lim-sup reward is the largest
    distance on the loop.  ``bound`` is accepted for interface symmetry.
    """
    p = product(system, test, STRONG_REGIME) if system.is_io() and test.is_io() \
        else product(system, test, LTS_REGIME)
    return min_reward(p)


def min_reward(p) -> RewardBound:
    reach = p.reachable()
    adj = {v: list(p.successors(v)) for v in reach}
    rewards = p.rewards
    obs = analysis._task_obligations(p)
    edges_all = [(u, a, v, rewards.get((u, a, v), 0.0)) for u in reach for a, v in adj[u]]

    def stem_to(target, pred_tree=None):
        if pred_tree is None:
            start, steps = analysis.bfs_path(p.starts, adj, lambda v: v == target)
            return FiniteExecution.from_steps(start, steps)
        steps, cur = [], target
        while cur in pred_tree:
            u, a, _ = pred_tree[cur]
            steps.append((u, a, cur))
            cur = u
        steps.reverse()
        return FiniteExecution.from_steps(cur, steps)

    comps = [c for c in analysis.sccs(sorted(reach), lambda v: [w for _, w in adj[v]])]
    fair_comps, zero_comps = [], []
    for comp in sorted(comps, key=min):
        loop = analysis._fair_cycle(comp, adj, obs)
        if loop is None:
            continue
        fair_comps.append(comp)
        cset = set(comp)
        inner = [e for e in edges_all if e[0] in cset and e[2] in cset]
        dist, pred, neg = _bellman_ford(comp, inner, [min(comp)])
        if neg is not None:
            cycle = _negative_cycle(pred, neg, len(comp))
            lasso = _neg_lasso(p, adj, comp, loop, cycle, stem_to)
            return RewardBound(-math.inf, True, lasso)
        if _tight_fair_cycle(comp, adj, dist, rewards, obs) is not None:
            zero_comps.append(comp)

    quiet = {v for v in reach if p.is_quiescent(v)}
    targets = set(quiet).union(*map(set, zero_comps)) if zero_comps else set(quiet)
    back = {}
    for u, a, v, _ in edges_all:
        back.setdefault(v, []).append(u)
    live = set(targets)
    stack = list(targets)
    while stack:
        v = stack.pop()
        for u in back.get(v, ()):
            if u not in live:
                live.add(u)
                stack.append(u)
    sources = [s for s in p.starts if s in live]
    edges = [e for e in edges_all if e[0] in live and e[2] in live]
    dist, pred, neg = _bellman_ford(sorted(live), edges, sources)
    if neg is not None:
        return RewardBound(-math.inf, False)

    best = None
    for q in sorted(quiet, key=lambda v: (dist[v], v)):
        if dist[q] < math.inf:
            best = (dist[q], stem_to(q, pred))
            break
    for comp in zero_comps:
        levels = sorted({dist[v] for v in comp if dist[v] < math.inf})
        for theta in levels:
            if best is not None and theta >= best[0]:
                break
            loop = _tight_fair_cycle(comp, adj, dist, rewards, obs, limit=theta)
            if loop is not None:
                root = loop[0][0]
                lasso = LassoExecution(stem_to(root, pred), FiniteExecution.from_steps(root, loop))
                best = (reward_of(p, lasso), lasso)
                break
    if best is not None:
        return RewardBound(best[0], True, best[1])
    if fair_comps:
        comp = fair_comps[0]
        loop = analysis._fair_cycle(comp, adj, obs)
        root = loop[0][0]
        lasso = LassoExecution(stem_to(root), FiniteExecution.from_steps(root, loop))
        return RewardBound(math.inf, True, lasso)
    return RewardBound(math.inf, False)


def _neg_lasso(p, adj, comp, fair_loop, cycle, stem_to):
    cset = set(comp)
    inner = {v: [(a, w) for a, w in adj[v] if w in cset] for v in comp}
    root, hub = fair_loop[0][0], cycle[0][0]

    def path(x, y):
        if x == y:
            return []
        return analysis.bfs_path([x], inner, lambda v: v == y)[1]

    go, ret = path(root, hub), path(hub, root)

    def total(steps):
        return sum(p.reward(*s) for s in steps)

    base = total(fair_loop) + total(go) + total(ret)
    per = total(cycle)
    m = max(1, int(math.floor(base / -per)) + 1)
    loop = fair_loop + go + cycle * m + ret
    return LassoExecution(stem_to(root), FiniteExecution.from_steps(root, loop))


# -- admissibility ---------------------------------------------------------


def admissible(a, b, test, regime) -> CompatibilityReport:
    """Whether ``test`` may be used to compare ``a`` and ``b`` under ``regime``."""
    regime = regime_name(regime)
    report = CompatibilityReport(regime)
    systems = (("A", a),) if a is b else (("A", a), ("B", b))
    if regime == LTS_REGIME:
        for name, other in systems:
            for k, act, ix in check_compatibility([test, other]).violations:
                report.add(k, act, *(("T", name)[i] for i in ix))
        return report
    if not (a.is_io() and b.is_io() and test.is_io()):
        report.add("not-io", "", "T")
        return report
    for name, other in systems:
        for k, act, ix in check_strong_compatibility([test, other]).violations:
            report.add(k, act, *(("T", name)[i] for i in ix))
    if regime == EMPTY_INPUT:
        for name, other in systems:
            for act in sorted(test.inputs - other.outputs):
                report.add("test-input-not-output", act, "T", name)
            for act in sorted(other.inputs - test.outputs):
                report.add("input-not-controlled-by-test", act, name, "T")
    elif regime == COMPLEMENTARY:
        for name, other in systems:
            if not is_complementary(test, other.signature):
                report.add("not-complementary", "", "T", name)
    return report
