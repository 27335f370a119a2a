"""Composition and the automaton-to-automaton transformations on tests."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .model import IO, LTS, SUCCESS, Automaton, Signature

STRONG = "strong"
PLAIN = "plain"
EMPTY_INPUT = "empty-input"
COMPLEMENTARY = "complementary"


class ModeMismatch(ValueError):
    pass


class IncompatibleComponents(ValueError):
    def __init__(self, report):
        self.report = report
        super().__init__("incompatible components: %s" % report.describe())


class WNotPresent(ValueError):
    pass


@dataclass
class CompatibilityReport:
    regime: str
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def add(self, kind, action, *indices):
        self.violations.append((kind, action, tuple(indices)))

    def describe(self):
        if self.ok:
            return "%s: ok" % self.regime
        return "%s: " % self.regime + "; ".join(
            "%s on %s between %s" % (k, a, "/".join(map(str, ix))) for k, a, ix in self.violations)

    def to_dict(self):
        return {
            "regime": self.regime,
            "ok": self.ok,
            "violations": [{"kind": k, "action": a, "automata": list(ix)}
                           for k, a, ix in self.violations],
        }


def _internal_clause(report, automata):
    for i, a in enumerate(automata):
        for j, b in enumerate(automata):
            if i != j:
                for act in sorted(a.internals & b.actions):
                    report.add("internal-shared", act, i, j)


def check_strong_compatibility(automata) -> CompatibilityReport:
    automata = list(automata)
    if any(not a.is_io() for a in automata):
        raise ModeMismatch("strong compatibility is defined for I/O automata only")
    report = CompatibilityReport(STRONG)
    _internal_clause(report, automata)
    for i, a in enumerate(automata):
        for j in range(i + 1, len(automata)):
            for act in sorted(a.outputs & automata[j].outputs):
                report.add("output-shared", act, i, j)
    return report


def check_compatibility(automata) -> CompatibilityReport:
    report = CompatibilityReport(PLAIN)
    _internal_clause(report, list(automata))
    return report


def _state_name(parts):
    return ".".join(parts)


def compose(automata, kind=None, name=None) -> Automaton:
    """Synchronised product of ``automata``, restricted to reachable states.

    ``kind`` is ``"io"`` (requires strong compatibility) or ``"lts"`` (plain
    compatibility, classification coerced to external/internal).  By default
    it is ``"io"`` when every component is an I/O automaton.
    """
    automata = list(automata)
    if not automata:
        raise ValueError("nothing to compose")
    if kind is None:
        kind = IO if all(a.is_io() for a in automata) else LTS
    report = check_strong_compatibility(automata) if kind == IO else check_compatibility(automata)
    if not report.ok:
        raise IncompatibleComponents(report)

    outputs = frozenset().union(*(a.outputs for a in automata))
    inputs = frozenset().union(*(a.inputs for a in automata)) - outputs
    internals = frozenset().union(*(a.internals for a in automata))
    acts = [a.actions for a in automata]
    all_actions = sorted(inputs | outputs | internals)

    tasks = {}
    if kind == IO:
        names = [a.name for a in automata]
        distinct = len(set(names)) == len(names)
        for i, a in enumerate(automata):
            prefix = names[i] if distinct else str(i)
            for tname, tacts in a.tasks.items():
                tasks["%s:%s" % (prefix, tname)] = tacts

    starts = [tuple(p) for p in product(*(sorted(a.starts) for a in automata))]
    seen = set(starts)
    stack = list(starts)
    trans = {}
    while stack:
        vec = stack.pop()
        for act in all_actions:
            moves = []
            for i, a in enumerate(automata):
                if act in acts[i]:
                    opts = [(t, a.reward(vec[i], act, t)) for b, t in a.successors(vec[i]) if b == act]
                    if not opts:
                        break
                    moves.append(opts)
                else:
                    moves.append([(vec[i], 0.0)])
            else:
                for combo in product(*moves):
                    target = tuple(t for t, _ in combo)
                    trans[(vec, act, target)] = sum(r for _, r in combo)
                    if target not in seen:
                        seen.add(target)
                        stack.append(target)

    names = {vec: _state_name(vec) for vec in seen}
    if len(set(names.values())) != len(names):
        raise ValueError("composed state names collide; avoid '.' in state ids")
    order = sorted(seen)
    return Automaton(
        name=name or "||".join(a.name for a in automata),
        kind=kind,
        inputs=inputs,
        outputs=outputs,
        internals=internals,
        states=[names[v] for v in order],
        starts=[names[v] for v in starts],
        transitions=[(names[s], a, names[t]) for s, a, t in trans],
        tasks=tasks,
        rewards={(names[s], a, names[t]): r for (s, a, t), r in trans.items() if r},
        components=automata,
        parts={names[v]: v for v in order},
    )


def hide_for_testing(composition: Automaton) -> Automaton:
    """Reclassify every action except ``w`` as internal."""
    ext = {SUCCESS} & composition.actions
    return composition.replace(
        kind=LTS,
        inputs=(),
        outputs=ext,
        internals=composition.actions - ext,
        tasks={},
    )


def saturate_inputs(test: Automaton, extra) -> Automaton:
    """Add ``extra`` as inputs of ``test`` with a self-loop at every state."""
    extra = frozenset(extra) - test.external
    if not extra:
        return test
    if extra & test.internals:
        raise ValueError("saturation actions clash with internals: %s" % sorted(extra & test.internals))
    loops = [(s, a, s) for s in test.states for a in extra]
    return test.replace(inputs=test.inputs | extra, transitions=test.transitions | set(loops))


def _singleton_tasks(local):
    return {a: [a] for a in sorted(local)}


def complementarize(test: Automaton, sig: Signature) -> Automaton:
    """Reclassify a test so that it is complementary to automata of ``sig``.

    Inputs shared with ``sig.inputs`` become outputs, external actions that
    ``sig`` does not know become internal.  Requires ``sig.external`` to be
    a subset of the test's external actions (see :func:`saturate_inputs`).
    """
    if SUCCESS not in test.external:
        raise WNotPresent("test has no success action")
    missing = sig.external - test.external
    if missing:
        raise ValueError("saturate the test first; missing %s" % sorted(missing))
    keep = sig.external | {SUCCESS}
    outputs = (test.outputs & keep) | (test.inputs & sig.inputs)
    inputs = test.inputs - sig.inputs
    stray = test.external - keep
    internals = test.internals | stray
    if internals & sig.internals:
        raise ValueError("test internals clash with the automaton's internals")
    return test.replace(
        inputs=inputs & keep,
        outputs=outputs,
        internals=internals,
        tasks=_singleton_tasks(outputs | internals),
    )


def is_complementary(test: Automaton, sig: Signature) -> bool:
    return (test.is_io()
            and SUCCESS not in sig.inputs
            and test.outputs == sig.inputs | {SUCCESS}
            and test.inputs == sig.outputs
            and not (test.internals & sig.internals))


def reclass_inputs_to_outputs(test: Automaton, actions) -> Automaton:
    actions = frozenset(actions)
    if not actions <= test.inputs:
        raise ValueError("can only reclassify inputs of the test")
    if not actions:
        return test
    tasks = dict(test.tasks)
    for a in sorted(actions):
        name = a
        while name in tasks:
            name += "'"
        tasks[name] = [a]
    return test.replace(inputs=test.inputs - actions, outputs=test.outputs | actions, tasks=tasks)


def success_states(automaton: Automaton):
    return {s for s in automaton.states if SUCCESS in automaton.enabled(s)}


def prune_success(test: Automaton) -> Automaton:
    """Drop non-``w`` moves out of success states; keep those states input-enabled."""
    succ = success_states(test)
    if not succ:
        return test
    kept = [(s, a, t) for s, a, t in test.transitions if s not in succ or a == SUCCESS]
    loops = [(s, a, s) for s in succ for a in test.inputs]
    kept_set = set(kept) | set(loops)
    return test.replace(
        transitions=kept_set,
        rewards={k: v for k, v in test.rewards.items() if k in kept_set},
    )


def code_as_reward(test: Automaton, polarity="must") -> Automaton:
    """Reward test: +1 (must) or -1 (surv) on every transition into a success state."""
    if polarity not in ("must", "surv"):
        raise ValueError("polarity must be 'must' or 'surv'")
    value = 1.0 if polarity == "must" else -1.0
    succ = success_states(test)
    rewards = {(s, a, t): value for s, a, t in test.transitions if t in succ and s not in succ}
    return test.replace(rewards=rewards, name=test.name + "#reward")
