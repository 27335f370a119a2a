"""Enabledness, quiescence, fairness, traces, projections and rewards."""

from __future__ import annotations

import math

from .model import SUCCESS, Automaton, FiniteExecution, LassoExecution, LassoWord


class UnknownState(KeyError):
    pass


class InvalidLasso(ValueError):
    pass


def _known(automaton, state):
    if state not in automaton.states:
        raise UnknownState(state)


def enabled_actions(automaton: Automaton, state):
    _known(automaton, state)
    return automaton.enabled(state)


def enabled_tasks(automaton: Automaton, state):
    _known(automaton, state)
    return automaton.enabled_tasks(state)


def is_quiescent(automaton: Automaton, state) -> bool:
    """No locally-controlled action is enabled in ``state``."""
    _known(automaton, state)
    return automaton.is_quiescent(state)


def is_fair_finite(automaton: Automaton, execution: FiniteExecution) -> bool:
    # A task enabled at the last state is enabled throughout the one-state
    # suffix that consists of that state alone, and never taken there.
    return automaton.is_quiescent(execution.last)


def is_fair_lasso(automaton: Automaton, lasso: LassoExecution) -> bool:
    """Each task is disabled at some loop state or taken inside the loop."""
    if lasso.loop.first != lasso.loop.last or not len(lasso.loop):
        raise InvalidLasso("loop must be a nonempty cycle")
    loop_states = lasso.loop.states[:-1]
    taken = set(lasso.loop.actions)
    for acts in automaton.tasks.values():
        if acts & taken:
            continue
        if all(acts & automaton.enabled(s) for s in loop_states):
            return False
    return True


def is_fair(automaton: Automaton, execution) -> bool:
    if isinstance(execution, LassoExecution):
        return is_fair_lasso(automaton, execution)
    return is_fair_finite(automaton, execution)


def sched(execution):
    if isinstance(execution, LassoExecution):
        return execution.stem.actions, execution.loop.actions
    return execution.actions


def _external(automaton, actions):
    ext = automaton.external
    return tuple(a for a in actions if a in ext)


def trace(automaton: Automaton, execution):
    """External-action word of ``execution``: a tuple or a :class:`LassoWord`."""
    if isinstance(execution, LassoExecution):
        u = _external(automaton, execution.stem.actions)
        v = _external(automaton, execution.loop.actions)
        if not v:
            return u
        return LassoWord(u, v).normalized()
    return _external(automaton, execution.actions)


def _component(composition, k):
    if not composition.components or composition.parts is None:
        raise ValueError("%s is not a recorded composition" % composition.name)
    if not 1 <= k <= len(composition.components):
        raise ValueError("no component %d" % k)
    return composition.components[k - 1]


def _project_finite(composition, execution, k):
    comp = _component(composition, k)
    acts = comp.actions
    states = [composition.parts[execution.first][k - 1]]
    actions = []
    for s, a, t in execution.steps():
        if a in acts:
            actions.append(a)
            states.append(composition.parts[t][k - 1])
    return FiniteExecution(tuple(states), tuple(actions))


def project(composition: Automaton, execution, k: int):
    """Projection onto the ``k``-th component (1-based).

    A lasso whose loop contains no action of the component projects to a
    finite execution.
    """
    if isinstance(execution, LassoExecution):
        stem = _project_finite(composition, execution.stem, k)
        loop = _project_finite(composition, execution.loop, k)
        if not len(loop):
            return stem
        return LassoExecution(stem, loop)
    return _project_finite(composition, execution, k)


def restrict_word(composition: Automaton, word, k: int):
    acts = _component(composition, k).actions
    if isinstance(word, LassoWord):
        u = tuple(a for a in word.u if a in acts)
        v = tuple(a for a in word.v if a in acts)
        if not v:
            return u
        return LassoWord(u, v).normalized()
    return tuple(a for a in word if a in acts)


def _sum(automaton, execution):
    return sum(automaton.reward(s, a, t) for s, a, t in execution.steps())


def reward_of(automaton: Automaton, execution) -> float:
    """Total reward; a lasso with zero-sum loop scores the lim sup of partial sums."""
    if isinstance(execution, LassoExecution):
        stem = _sum(automaton, execution.stem)
        partial, best = 0.0, 0.0
        for s, a, t in execution.loop.steps():
            partial += automaton.reward(s, a, t)
            best = max(best, partial)
        if partial > 1e-12:
            return math.inf
        if partial < -1e-12:
            return -math.inf
        return stem + best
    return _sum(automaton, execution)


def is_successful_state(automaton: Automaton, state) -> bool:
    return SUCCESS in automaton.enabled(state)


def execution_successful(automaton: Automaton, execution, mode="state-based") -> bool:
    if isinstance(execution, LassoExecution):
        parts = [execution.stem, execution.loop]
    else:
        parts = [execution]
    if mode == "state-based":
        return any(is_successful_state(automaton, s) for p in parts for s in p.states)
    if mode == "action-based":
        return any(SUCCESS in p.actions for p in parts)
    raise ValueError("mode must be 'state-based' or 'action-based'")
