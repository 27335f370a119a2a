"""Graph algorithms over finite automata.

Weak fairness is handled as a generalized-Büchi-style condition: a strongly
connected set of states and transitions supports a fair cycle iff, for every
task, it either contains a state where the task is disabled or a transition
labelled by one of the task's actions.  Enabledness is always taken from the
unrestricted automaton, even when the search runs on a subgraph.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field

from .model import Automaton, FiniteExecution, LassoExecution, LassoWord

DEFAULT_MONOID_CAP = 20000


# -- generic graph helpers -------------------------------------------------


def sccs(nodes, succ):
    """Tarjan's algorithm, iterative.  ``succ(v)`` yields neighbour nodes."""
    index, low = {}, {}
    on_stack, stack, out = set(), [], []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(succ(root)))]
        while work:
            v, it = work[-1]
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.append(w)
                        if w == v:
                            break
                    out.append(comp)
    return out


def bfs_path(starts, adj, goal, allowed=None):
    """Shortest list of ``(src, label, dst)`` steps from ``starts`` to a goal node.

    ``adj`` maps nodes to sorted ``(label, node)`` lists.  Returns
    ``(start, steps)`` or ``None``.
    """
    starts = sorted(starts)
    parent = {}
    queue = deque()
    for s in starts:
        if s not in parent and (allowed is None or s in allowed):
            parent[s] = None
            queue.append(s)
    while queue:
        v = queue.popleft()
        if goal(v):
            steps = []
            while parent[v] is not None:
                p, lab = parent[v]
                steps.append((p, lab, v))
                v = p
            steps.reverse()
            return v, steps
        for lab, w in adj.get(v, ()):
            if w not in parent and (allowed is None or w in allowed):
                parent[w] = (v, lab)
                queue.append(w)
    return None


def _restricted_graph(starts, successors, node_ok, edge_ok):
    """Reachable part of the graph using only allowed nodes and edges."""
    adj = {}
    stack = [s for s in starts if node_ok(s)]
    seen = set(stack)
    while stack:
        v = stack.pop()
        out = []
        for lab, w in successors(v):
            if node_ok(w) and edge_ok(v, lab, w):
                out.append((lab, w))
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        adj[v] = sorted(out)
    return adj


def _fair_cycle(comp, adj, obligations):
    """A cycle inside ``comp`` meeting every obligation, or ``None``.

    Each obligation is ``(node_ok, edge_ok)``; it is met by visiting a node
    with ``node_ok(node)`` or by taking an edge whose label has ``edge_ok``.
    """
    comp = set(comp)
    inner = {v: [(lab, w) for lab, w in adj.get(v, ()) if w in comp] for v in comp}
    if not any(inner.values()):
        return None
    points = []
    nodes = sorted(comp)
    for node_ok, edge_ok in obligations:
        hit = next((v for v in nodes if node_ok(v)), None)
        if hit is not None:
            points.append(("node", hit))
            continue
        edge = next(((v, lab, w) for v in nodes for lab, w in inner[v] if edge_ok(lab)), None)
        if edge is None:
            return None
        points.append(("edge", edge))

    root = nodes[0]
    cur, steps = root, []

    def walk(target):
        nonlocal cur
        if cur == target:
            return
        _, path = bfs_path([cur], inner, lambda v: v == target)
        steps.extend(path)
        cur = target

    for what, p in sorted(set(points), key=lambda x: (x[0], x[1])):
        if what == "node":
            walk(p)
        else:
            walk(p[0])
            steps.append(p)
            cur = p[2]
    if not steps:
        # strongly connected with an edge: every node has an inner successor
        lab, w = inner[root][0]
        steps.append((root, lab, w))
        cur = w
    walk(root)
    return steps


def _find_fair(starts, adj, obligations, finite_ok=None):
    """Finite witness (to a ``finite_ok`` node) or fair lasso in ``adj``.

    Returns ``("finite", start, steps)``, ``("lasso", start, stem, loop)``
    or ``None``.
    """
    starts = [s for s in starts if s in adj]
    if finite_ok is not None:
        found = bfs_path(starts, adj, finite_ok)
        if found is not None:
            return ("finite",) + found
    comps = sccs(sorted(adj), lambda v: [w for _, w in adj.get(v, ())])
    for comp in sorted(comps, key=min):
        loop = _fair_cycle(comp, adj, obligations)
        if loop is None:
            continue
        root = loop[0][0]
        start, stem = bfs_path(starts, adj, lambda v: v == root)
        return ("lasso", start, stem, loop)
    return None


def _task_obligations(automaton, state_of=lambda v: v, label_of=lambda lab: lab):
    obs = []
    for acts in automaton.tasks.values():
        obs.append((
            lambda v, acts=acts: not (acts & automaton.enabled(state_of(v))),
            lambda lab, acts=acts: label_of(lab) in acts,
        ))
    return obs


# -- fair emptiness --------------------------------------------------------


@dataclass(frozen=True)
class FairWitness:
    kind: str
    execution: object

    def to_dict(self):
        return {"kind": self.kind, "execution": self.execution.to_dict()}


def _as_predicate(avoid):
    if avoid is None:
        return lambda s: False
    if callable(avoid):
        return avoid
    avoid = frozenset(avoid)
    return lambda s: s in avoid


def _to_execution(found, state_of=lambda v: v):
    if found[0] == "finite":
        _, start, steps = found
        ex = FiniteExecution.from_steps(start, steps)
        return FairWitness("finite", FiniteExecution(
            tuple(state_of(s) for s in ex.states), ex.actions))
    _, start, stem, loop = found
    st = FiniteExecution.from_steps(start, stem)
    lp = FiniteExecution.from_steps(loop[0][0], loop)
    return FairWitness("lasso", LassoExecution(
        FiniteExecution(tuple(state_of(s) for s in st.states), st.actions),
        FiniteExecution(tuple(state_of(s) for s in lp.states), lp.actions)))


def fair_emptiness(automaton: Automaton, avoid_states=None, avoid_actions=(), starts=None,
                   kinds=("finite", "lasso")):
    """A fair execution avoiding the given states and actions, or ``None``.

    ``avoid_states`` is a predicate or a collection; ``starts`` overrides the
    start states (used for fair completion from an arbitrary state).
    """
    bad_state = _as_predicate(avoid_states)
    bad_actions = frozenset(avoid_actions)
    starts = automaton.starts if starts is None else starts
    adj = _restricted_graph(starts, automaton.successors,
                            lambda s: not bad_state(s),
                            lambda s, a, t: a not in bad_actions)
    if "lasso" not in kinds:
        found = bfs_path([s for s in starts if s in adj], adj, automaton.is_quiescent)
        return None if found is None else _to_execution(("finite",) + found)
    finite_ok = automaton.is_quiescent if "finite" in kinds else None
    found = _find_fair(starts, adj, _task_obligations(automaton), finite_ok)
    return None if found is None else _to_execution(found)


def fair_completion_exists(automaton: Automaton, state) -> bool:
    return fair_emptiness(automaton, starts=[state]) is not None


# -- finite-word languages -------------------------------------------------


def _closure(automaton, states):
    seen = set(states)
    stack = list(seen)
    while stack:
        s = stack.pop()
        for a, t in automaton.successors(s):
            if a in automaton.internals and t not in seen:
                seen.add(t)
                stack.append(t)
    return frozenset(seen)


def _step(automaton, states, letter):
    nxt = {t for s in states for a, t in automaton.successors(s) if a == letter}
    return _closure(automaton, nxt)


@dataclass
class Acceptor:
    """Subset-construction acceptor over the external actions of ``automaton``."""

    automaton: Automaton
    accepting: frozenset

    def start(self):
        return _closure(self.automaton, self.automaton.starts)

    def run(self, word):
        cur = self.start()
        for a in word:
            cur = _step(self.automaton, cur, a)
        return cur

    def accepts(self, word) -> bool:
        return bool(self.run(word) & self.accepting)

    def words(self, max_len):
        """All accepted words up to ``max_len`` (for small alphabets)."""
        alphabet = sorted(self.automaton.external)
        out, layer = [], [((), self.start())]
        for n in range(max_len + 1):
            nxt = []
            for w, cur in layer:
                if not cur:
                    continue
                if cur & self.accepting:
                    out.append(w)
                if n < max_len:
                    nxt.extend((w + (a,), _step(self.automaton, cur, a)) for a in alphabet)
            layer = nxt
        return out


def trace_language(automaton):
    return Acceptor(automaton, frozenset(automaton.states))


def quiescent_language(automaton):
    return Acceptor(automaton, frozenset(s for s in automaton.states if automaton.is_quiescent(s)))


def divergent_states(automaton):
    """States lying on a fair cycle of internal transitions."""
    adj = {}
    for s in automaton.states:
        adj[s] = [(a, t) for a, t in automaton.successors(s) if a in automaton.internals]
    out = set()
    obs = _task_obligations(automaton)
    for comp in sccs(sorted(adj), lambda v: [w for _, w in adj[v]]):
        if _fair_cycle(comp, adj, obs) is not None:
            out.update(comp)
    return frozenset(out)


def finite_fairtrace_language(automaton: Automaton) -> Acceptor:
    """Acceptor for the finite traces of fair executions."""
    quiet = {s for s in automaton.states if automaton.is_quiescent(s)}
    return Acceptor(automaton, frozenset(quiet) | divergent_states(automaton))


def _subset_inclusion(sup: Acceptor, sub: Acceptor):
    """Shortest word accepted by ``sub`` but not ``sup``, or ``None``."""
    alphabet = sorted(sub.automaton.external)
    first = (sub.start(), sup.start())
    seen = {first}
    queue = deque([(first, ())])
    while queue:
        (b, a), word = queue.popleft()
        if (b & sub.accepting) and not (a & sup.accepting):
            return word
        for x in alphabet:
            nb = _step(sub.automaton, b, x)
            if not nb:
                continue
            na = _step(sup.automaton, a, x) if x in sup.automaton.external else frozenset()
            key = (nb, na)
            if key not in seen:
                seen.add(key)
                queue.append((key, word + (x,)))
    return None


@dataclass
class InclusionReport:
    holds: bool
    counterexample: object = None
    completeness: str = "exact"
    warnings: list = field(default_factory=list)

    def to_dict(self):
        from .model import word_to_dict
        return {
            "holds": self.holds,
            "counterexample": None if self.counterexample is None else word_to_dict(self.counterexample),
            "completeness": self.completeness,
            "warnings": list(self.warnings),
        }


def finite_trace_inclusion(a: Automaton, b: Automaton) -> InclusionReport:
    """Decide traces(b) ⊆ traces(a)."""
    cex = _subset_inclusion(trace_language(a), trace_language(b))
    return InclusionReport(cex is None, cex)


def quiescent_trace_inclusion(a: Automaton, b: Automaton) -> InclusionReport:
    """Decide qtraces(b) ⊆ qtraces(a)."""
    cex = _subset_inclusion(quiescent_language(a), quiescent_language(b))
    return InclusionReport(cex is None, cex)


# -- infinite fair traces --------------------------------------------------


def lasso_fairtrace_membership(automaton: Automaton, word: LassoWord):
    """Whether ``u v^ω`` is a fair trace; returns ``(member, lasso_or_None)``."""
    letters = word.u + word.v
    n, back = len(letters), len(word.u)
    ext = automaton.external

    def successors(node):
        q, i = node
        out = []
        for a, t in automaton.successors(q):
            if a not in ext:
                out.append((a, (t, i)))
            elif a == letters[i]:
                out.append((a, (t, i + 1 if i + 1 < n else back)))
        return out

    starts = [(q, 0) for q in sorted(automaton.starts)]
    adj = _restricted_graph(starts, successors, lambda v: True, lambda v, a, w: True)
    obs = _task_obligations(automaton, state_of=lambda v: v[0])
    obs.append((lambda v: False, lambda lab: lab in ext))
    found = _find_fair(starts, adj, obs)
    if found is None:
        return False, None
    return True, _to_execution(found, state_of=lambda v: v[0]).execution


class _Profiles:
    """Behaviour of an automaton over finite nonempty words.

    A profile is a frozenset of ``(p, q, mask)``: some execution reads the
    word from ``p`` to ``q`` and meets the fairness obligations in ``mask``
    (bit i: task i disabled at a visited state or one of its actions taken).
    Only maximal masks are kept per ``(p, q)``.
    """

    def __init__(self, automaton: Automaton):
        self.automaton = automaton
        tasks = list(automaton.tasks.values())
        self.full = (1 << len(tasks)) - 1
        self.dis = {}
        for s in automaton.states:
            m = 0
            for i, acts in enumerate(tasks):
                if not (acts & automaton.enabled(s)):
                    m |= 1 << i
            self.dis[s] = m
        self.act = {}
        for i, acts in enumerate(tasks):
            for a in acts:
                self.act[a] = 1 << i
        self.letters = {a: self._letter(a) for a in sorted(automaton.external)}

    def _letter(self, letter):
        aut = self.automaton
        triples = set()
        for p in aut.states:
            start = (p, self.dis[p], 0)
            seen = {start}
            stack = [start]
            while stack:
                q, m, phase = stack.pop()
                if phase:
                    triples.add((p, q, m))
                for a, t in aut.successors(q):
                    if a in aut.internals:
                        node = (t, m | self.act.get(a, 0) | self.dis[t], phase)
                    elif a == letter and not phase:
                        node = (t, m | self.act.get(a, 0) | self.dis[t], 1)
                    else:
                        continue
                    if node not in seen:
                        seen.add(node)
                        stack.append(node)
        return _maximal(triples)

    @staticmethod
    def compose(x, y):
        by_src = {}
        for q, r, m in y:
            by_src.setdefault(q, []).append((r, m))
        out = set()
        for p, q, m in x:
            for r, m2 in by_src.get(q, ()):
                out.add((p, r, m | m2))
        return _maximal(out)

    def accepts(self, states, idem):
        """Some run from ``states`` reading ``v^ω`` is fair (``idem`` idempotent)."""
        loops = {p for p, q, m in idem if p == q and m == self.full}
        return any(p in states and q in loops for p, q, _ in idem)

    def after(self, states, letter):
        return frozenset(q for p, q, _ in self.letters.get(letter, ()) if p in states)


def _maximal(triples):
    best = {}
    for p, q, m in triples:
        best.setdefault((p, q), set()).add(m)
    out = set()
    for (p, q), masks in best.items():
        for m in masks:
            if not any(m != n and m & n == m for n in masks):
                out.add((p, q, m))
    return frozenset(out)


def _idempotent_power(prof, elem):
    power, n = elem, 1
    seen = set()
    while True:
        sq = (prof[0].compose(power[0], power[0]), prof[1].compose(power[1], power[1]))
        if sq == power:
            return power, n
        if power in seen:
            # every element has an idempotent power; this only guards loops
            raise RuntimeError("idempotent power not found")
        seen.add(power)
        power = (prof[0].compose(power[0], elem[0]), prof[1].compose(power[1], elem[1]))
        n += 1


def infinite_fairtrace_inclusion(sup: Automaton, sub: Automaton, depth=None,
                                 cap=DEFAULT_MONOID_CAP):
    """Search an infinite fair trace of ``sub`` that is not one of ``sup``.

    Enumerates the joint profile monoid breadth-first up to word length
    ``depth`` (unbounded when ``None``).  Returns ``(counterexample, exact)``
    where ``exact`` says the monoid was exhausted.
    """
    prof = (_Profiles(sup), _Profiles(sub))
    alphabet = sorted(sub.external)
    gens = {a: (prof[0].letters.get(a, frozenset()), prof[1].letters[a]) for a in alphabet}

    elems = {}
    frontier = []
    for a in alphabet:
        e = gens[a]
        if e[1] and e not in elems:
            elems[e] = (a,)
            frontier.append(e)
    length, exact = 1, True
    while frontier:
        if depth is not None and length >= depth:
            exact = False
            break
        nxt = []
        for e in frontier:
            word = elems[e]
            for a in alphabet:
                f = (prof[0].compose(e[0], gens[a][0]), prof[1].compose(e[1], gens[a][1]))
                if f[1] and f not in elems:
                    elems[f] = word + (a,)
                    nxt.append(f)
                    if len(elems) > cap:
                        exact = False
                        nxt = []
                        break
            if not exact:
                break
        if not exact:
            break
        frontier = nxt
        length += 1

    idems = {}
    for e, word in elems.items():
        idem, n = _idempotent_power(prof, e)
        if idem not in idems or len(idems[idem]) > len(word) * n:
            idems[idem] = word * n
    idem_list = sorted(idems.items(), key=lambda kv: (len(kv[1]), kv[1]))

    first = (frozenset(sup.starts), frozenset(sub.starts))
    seen = {first: ()}
    queue = deque([first])
    best = None
    while queue:
        sa, sb = pair = queue.popleft()
        u = seen[pair]
        if best is not None and len(u) >= len(best.u) + len(best.v):
            break
        for idem, v in idem_list:
            if prof[1].accepts(sb, idem[1]) and not prof[0].accepts(sa, idem[0]):
                cand = LassoWord(u, v)
                if best is None or (len(u) + len(v), u, v) < (len(best.u) + len(best.v), best.u, best.v):
                    best = cand
                break
        for a in alphabet:
            nb = prof[1].after(sb, a)
            if not nb:
                continue
            key = (prof[0].after(sa, a), nb)
            if key not in seen:
                seen[key] = u + (a,)
                queue.append(key)
    return (None if best is None else best.normalized()), exact


def default_bound(a: Automaton, b: Automaton):
    env = os.environ.get("IOFAIR_LASSO_BOUND")
    if env:
        return int(env)
    return len(a.states) * len(b.states) + len(b.states)


def fair_trace_inclusion(a: Automaton, b: Automaton, bound=None, mode="bounded") -> InclusionReport:
    """Decide fairtraces(b) ⊆ fairtraces(a).

    Finite fair traces are compared exactly.  Infinite ones are compared on
    the profile monoid; ``mode="bounded"`` limits its exploration to words
    of length ``bound``, ``mode="exact"`` explores it completely (subject to
    the element cap).  Completeness is reported either way.
    """
    if mode not in ("bounded", "exact"):
        raise ValueError("mode must be 'bounded' or 'exact'")
    cex = _subset_inclusion(finite_fairtrace_language(a), finite_fairtrace_language(b))
    if cex is not None:
        return InclusionReport(False, cex)
    k = default_bound(a, b) if bound is None else bound
    word, exact = infinite_fairtrace_inclusion(a, b, depth=None if mode == "exact" else k)
    if word is not None:
        in_b, _ = lasso_fairtrace_membership(b, word)
        in_a, _ = lasso_fairtrace_membership(a, word)
        if not in_b or in_a:
            raise AssertionError("counterexample %s failed re-verification" % word)
        return InclusionReport(False, word)
    if exact:
        return InclusionReport(True)
    return InclusionReport(True, None, "bounded(%d)" % k, [
        "BoundTooSmallWarning: infinite fair traces explored up to length %d only" % k])


# -- convergence -----------------------------------------------------------


def is_strongly_convergent(automaton: Automaton) -> bool:
    """No reachable cycle of internal transitions."""
    reach = automaton.reachable()
    adj = {s: [t for a, t in automaton.successors(s) if a in automaton.internals] for s in reach}
    for comp in sccs(sorted(reach), lambda v: adj[v]):
        if len(comp) > 1 or comp[0] in adj[comp[0]]:
            return False
    return True


def is_finitely_branching(automaton: Automaton) -> bool:
    # the transition relation is a finite set, so every state has finitely
    # many successors
    return True
