"""Core data types: automata, executions and words.

An :class:`Automaton` is either an I/O automaton (``kind="io"``) with inputs,
outputs, internal actions and a task partition, or a plain labelled
transition system (``kind="lts"``) in which inputs and outputs are just
external actions and no input-enabling or task structure is required.

State ids and action names are strings.  Automata are never mutated after
construction; every transformation returns a fresh object.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import NamedTuple

SUCCESS = "w"
IO = "io"
LTS = "lts"


class Violation(NamedTuple):
    kind: str
    subject: tuple = ()

    def __str__(self):
        if not self.subject:
            return self.kind
        return "%s(%s)" % (self.kind, ", ".join(str(s) for s in self.subject))


class InvalidAutomaton(ValueError):
    """Raised by :func:`validate`; carries every violation found."""

    def __init__(self, violations, name=None):
        self.violations = list(violations)
        self.name = name
        what = "automaton %s" % name if name else "automaton"
        super().__init__("invalid %s: %s" % (what, "; ".join(map(str, self.violations))))


class Signature(NamedTuple):
    inputs: frozenset
    outputs: frozenset
    internals: frozenset = frozenset()

    @property
    def external(self):
        return self.inputs | self.outputs


class Automaton:
    """A finite automaton with classified actions.

    ``tasks`` maps task names to sets of locally-controlled actions.
    ``rewards`` maps transitions ``(s, a, t)`` to reals (absent means 0).
    Composite automata additionally record their ``components`` and, in
    ``parts``, the tuple of component states behind each product state.
    """

    __slots__ = (
        "name", "kind", "inputs", "outputs", "internals", "states", "starts",
        "transitions", "tasks", "rewards", "components", "parts",
        "_succ", "_enabled", "_task_of",
    )

    def __init__(self, name, kind, inputs, outputs, internals, states, starts,
                 transitions, tasks=None, rewards=None, components=(), parts=None):
        self.name = name
        self.kind = kind
        self.inputs = frozenset(inputs)
        self.outputs = frozenset(outputs)
        self.internals = frozenset(internals)
        self.states = tuple(states)
        self.starts = frozenset(starts)
        self.transitions = frozenset(tuple(t) for t in transitions)
        self.tasks = {k: frozenset(v) for k, v in sorted((tasks or {}).items())}
        self.rewards = {tuple(k): float(v) for k, v in (rewards or {}).items() if v}
        self.components = tuple(components)
        self.parts = dict(parts) if parts else None

        succ = defaultdict(list)
        for s, a, t in self.transitions:
            succ[s].append((a, t))
        self._succ = {s: tuple(sorted(v)) for s, v in succ.items()}
        self._enabled = {s: frozenset(a for a, _ in v) for s, v in self._succ.items()}
        self._task_of = {a: k for k, acts in self.tasks.items() for a in acts}

    # -- signature ---------------------------------------------------------

    @property
    def external(self):
        return self.inputs | self.outputs

    @property
    def local(self):
        return self.outputs | self.internals

    @property
    def actions(self):
        return self.inputs | self.outputs | self.internals

    @property
    def signature(self):
        return Signature(self.inputs, self.outputs, self.internals)

    def is_io(self):
        return self.kind == IO

    def task_of(self, action):
        return self._task_of.get(action)

    # -- structure ---------------------------------------------------------

    def successors(self, state):
        """Sorted ``(action, target)`` pairs leaving ``state``."""
        return self._succ.get(state, ())

    def enabled(self, state):
        return self._enabled.get(state, frozenset())

    def enabled_tasks(self, state):
        en = self.enabled(state)
        return frozenset(k for k, acts in self.tasks.items() if acts & en)

    def is_quiescent(self, state):
        return not (self.enabled(state) & self.local)

    def reward(self, s, a, t):
        return self.rewards.get((s, a, t), 0.0)

    def reachable(self, starts=None):
        seen = set(self.starts if starts is None else starts)
        stack = list(seen)
        while stack:
            s = stack.pop()
            for _, t in self.successors(s):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return seen

    # -- conversion --------------------------------------------------------

    def replace(self, **changes):
        fields = dict(
            name=self.name, kind=self.kind, inputs=self.inputs,
            outputs=self.outputs, internals=self.internals, states=self.states,
            starts=self.starts, transitions=self.transitions, tasks=self.tasks,
            rewards=self.rewards, components=self.components, parts=self.parts,
        )
        fields.update(changes)
        return Automaton(**fields)

    def to_dict(self):
        d = {
            "name": self.name,
            "kind": self.kind,
            "inputs": sorted(self.inputs),
            "outputs": sorted(self.outputs),
            "internals": sorted(self.internals),
            "states": list(self.states),
            "starts": sorted(self.starts),
            "tasks": {k: sorted(v) for k, v in self.tasks.items()},
            "transitions": [list(t) for t in sorted(self.transitions)],
        }
        if self.rewards:
            d["rewards"] = [[s, a, t, r] for (s, a, t), r in sorted(self.rewards.items())]
        return d

    def _key(self):
        return (self.kind, self.inputs, self.outputs, self.internals,
                frozenset(self.states), self.starts, self.transitions,
                tuple(self.tasks.items()), tuple(sorted(self.rewards.items())))

    def __eq__(self, other):
        if not isinstance(other, Automaton):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return "<Automaton %s %s: %d states, %d transitions>" % (
            self.name, self.kind, len(self.states), len(self.transitions))


# -- executions and words --------------------------------------------------


@dataclass(frozen=True)
class FiniteExecution:
    states: tuple
    actions: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "actions", tuple(self.actions))
        if not self.states or len(self.states) != len(self.actions) + 1:
            raise ValueError("execution needs len(states) == len(actions) + 1 >= 1")

    @property
    def first(self):
        return self.states[0]

    @property
    def last(self):
        return self.states[-1]

    def __len__(self):
        return len(self.actions)

    def steps(self):
        return list(zip(self.states, self.actions, self.states[1:]))

    def then(self, other):
        if other.first != self.last:
            raise ValueError("cannot concatenate: %r != %r" % (self.last, other.first))
        return FiniteExecution(self.states + other.states[1:], self.actions + other.actions)

    @classmethod
    def from_steps(cls, start, steps):
        states, actions = [start], []
        for s, a, t in steps:
            if s != states[-1]:
                raise ValueError("disconnected step %r" % ((s, a, t),))
            actions.append(a)
            states.append(t)
        return cls(tuple(states), tuple(actions))

    def to_dict(self):
        return {"states": list(self.states), "actions": list(self.actions)}


@dataclass(frozen=True)
class LassoExecution:
    """``stem`` followed by ``loop`` repeated forever."""

    stem: FiniteExecution
    loop: FiniteExecution

    def __post_init__(self):
        if len(self.loop) == 0:
            raise ValueError("lasso loop must contain at least one action")
        if self.loop.first != self.loop.last:
            raise ValueError("lasso loop must end where it starts")
        if self.stem.last != self.loop.first:
            raise ValueError("lasso loop must start at the end of the stem")

    def unrolled(self, times=2):
        loop = self.loop
        for _ in range(times - 1):
            loop = loop.then(self.loop)
        return LassoExecution(self.stem, loop)

    def rotated(self, k=1):
        """Move the first ``k`` loop steps into the stem."""
        steps = self.loop.steps()
        k %= len(steps)
        moved = FiniteExecution.from_steps(self.loop.first, steps[:k])
        new_loop = FiniteExecution.from_steps(moved.last, steps[k:] + steps[:k])
        return LassoExecution(self.stem.then(moved), new_loop)

    def to_dict(self):
        return {"stem": self.stem.to_dict(), "loop": self.loop.to_dict()}


class EmptyLoop(ValueError):
    pass


@dataclass(frozen=True)
class LassoWord:
    """The ultimately periodic word ``u v v v ...``."""

    u: tuple
    v: tuple

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(self.u))
        object.__setattr__(self, "v", tuple(self.v))
        if not self.v:
            raise EmptyLoop("a lasso word needs a nonempty period")

    def normalized(self):
        """Shortest period, rolled as far left as possible."""
        u, v = list(self.u), list(self.v)
        n = len(v)
        for p in range(1, n + 1):
            if n % p == 0 and v == v[:p] * (n // p):
                v = v[:p]
                break
        while u and u[-1] == v[-1]:
            u.pop()
            v = [v[-1]] + v[:-1]
        return LassoWord(tuple(u), tuple(v))

    def prefix(self, n):
        out = list(self.u[:n])
        i = 0
        while len(out) < n:
            out.append(self.v[i % len(self.v)])
            i += 1
        return tuple(out)

    def __str__(self):
        return "%s(%s)^w" % (" ".join(self.u) + (" " if self.u else ""), " ".join(self.v))

    def to_dict(self):
        return {"u": list(self.u), "v": list(self.v)}


def word_to_dict(word):
    if isinstance(word, LassoWord):
        return word.to_dict()
    return {"word": list(word)}


def format_word(word):
    if isinstance(word, LassoWord):
        return str(word)
    return " ".join(word) if word else "ε"


# -- validation ------------------------------------------------------------


def _as_list(x):
    if x is None:
        return []
    if isinstance(x, str):
        return x.split()
    return list(x)


def violations(raw) -> list:
    """Every invariant violation of a raw automaton description.

    ``raw`` is a mapping with the keys produced by :meth:`Automaton.to_dict`
    (``start`` is accepted as an alias of ``starts``).  Transitions may carry
    a fourth element, the reward.
    """
    probs = []
    kind = raw.get("kind", IO)
    if kind not in (IO, LTS):
        probs.append(Violation("BadKind", (kind,)))
    inputs = _as_list(raw.get("inputs"))
    outputs = _as_list(raw.get("outputs"))
    internals = _as_list(raw.get("internals"))
    states = _as_list(raw.get("states"))
    starts = _as_list(raw.get("starts", raw.get("start")))

    seen = {}
    for cls, names in (("input", inputs), ("output", outputs), ("internal", internals)):
        for a in names:
            if a in seen:
                probs.append(Violation("DuplicateAction", (a,)))
            seen[a] = cls
    if SUCCESS in seen:
        ok = seen[SUCCESS] == "output" if kind == IO else seen[SUCCESS] != "internal"
        if not ok:
            probs.append(Violation("ReservedAction", (SUCCESS,)))
    if len(set(states)) != len(states):
        for s in sorted({s for s in states if states.count(s) > 1}):
            probs.append(Violation("DuplicateState", (s,)))
    state_set = set(states)

    if not starts:
        probs.append(Violation("EmptyStarts"))
    for s in starts:
        if s not in state_set:
            probs.append(Violation("UndeclaredSymbol", (s,)))

    trans = set()
    for tr in raw.get("transitions", ()):
        tr = list(tr)
        if len(tr) not in (3, 4):
            probs.append(Violation("BadTransition", (tuple(tr),)))
            continue
        s, a, t = tr[:3]
        bad = False
        for sym, known in ((s, state_set), (a, seen), (t, state_set)):
            if sym not in known:
                probs.append(Violation("UndeclaredSymbol", (sym,)))
                bad = True
        if not bad:
            trans.add((s, a, t))
    for r in raw.get("rewards", ()) or ():
        s, a, t = r[:3]
        if (s, a, t) not in trans:
            probs.append(Violation("UndeclaredSymbol", ((s, a, t),)))

    tasks = raw.get("tasks") or {}
    if kind == IO:
        owner = {}
        for tname, acts in tasks.items():
            for a in _as_list(acts):
                if a not in seen:
                    probs.append(Violation("UndeclaredSymbol", (a,)))
                elif seen[a] == "input":
                    probs.append(Violation("BadPartition", (a,)))
                elif a in owner:
                    probs.append(Violation("BadPartition", (a,)))
                owner[a] = tname
        if tasks:
            for a in outputs + internals:
                if a not in owner:
                    probs.append(Violation("BadPartition", (a,)))
        enabled = defaultdict(set)
        for s, a, _ in trans:
            enabled[s].add(a)
        for s in states:
            for a in inputs:
                if a not in enabled[s]:
                    probs.append(Violation("MissingInputEnabling", (s, a)))
    elif tasks:
        probs.append(Violation("TasksNotAllowed", (raw.get("name", ""),)))
    return probs


def validate(raw) -> Automaton:
    """Build a checked :class:`Automaton` or raise :class:`InvalidAutomaton`.

    An IO automaton without any task declaration gets one singleton task
    per locally-controlled action.
    """
    if isinstance(raw, Automaton):
        raw = raw.to_dict()
    probs = violations(raw)
    if probs:
        raise InvalidAutomaton(probs, raw.get("name"))
    kind = raw.get("kind", IO)
    outputs = _as_list(raw.get("outputs"))
    internals = _as_list(raw.get("internals"))
    tasks = {k: _as_list(v) for k, v in (raw.get("tasks") or {}).items()}
    if kind == IO and not tasks:
        tasks = {a: [a] for a in outputs + internals}
    rewards = {}
    transitions = []
    for tr in raw.get("transitions", ()):
        transitions.append(tuple(tr[:3]))
        if len(tr) == 4:
            rewards[tuple(tr[:3])] = tr[3]
    for r in raw.get("rewards", ()) or ():
        rewards[tuple(r[:3])] = r[3]
    return Automaton(
        name=raw.get("name", "A"),
        kind=kind,
        inputs=_as_list(raw.get("inputs")),
        outputs=outputs,
        internals=internals,
        states=_as_list(raw.get("states")),
        starts=_as_list(raw.get("starts", raw.get("start"))),
        transitions=transitions,
        tasks=tasks if kind == IO else {},
        rewards=rewards,
    )


def check(automaton: Automaton) -> list:
    """Violations of an already constructed automaton."""
    return violations(automaton.to_dict())


class RenameError(ValueError):
    pass


def rename_internals(automaton: Automaton, mapping) -> Automaton:
    """Bijectively rename internal actions; transitions and tasks follow."""
    mapping = dict(mapping)
    if set(mapping) != set(automaton.internals):
        raise RenameError("NotABijection: map must be defined on exactly the internal actions")
    if len(set(mapping.values())) != len(mapping):
        raise RenameError("NotABijection: two internal actions map to the same name")
    clash = set(mapping.values()) & automaton.external
    if clash:
        raise RenameError("NameClash: %s" % ", ".join(sorted(clash)))

    def ren(a):
        return mapping.get(a, a)

    return automaton.replace(
        internals=[ren(a) for a in automaton.internals],
        transitions=[(s, ren(a), t) for s, a, t in automaton.transitions],
        tasks={k: [ren(a) for a in v] for k, v in automaton.tasks.items()},
        rewards={(s, ren(a), t): r for (s, a, t), r in automaton.rewards.items()},
    )


def is_execution(automaton: Automaton, execution, from_start=True) -> bool:
    """Whether a finite or lasso execution is a valid execution of ``automaton``."""
    if isinstance(execution, LassoExecution):
        return (is_execution(automaton, execution.stem, from_start)
                and is_execution(automaton, execution.loop, False))
    if from_start and execution.first not in automaton.starts:
        return False
    if execution.first not in automaton.states:
        return False
    return all(t in automaton.transitions for t in execution.steps())
