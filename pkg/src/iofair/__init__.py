"""I/O automata with task-based weak fairness: composition, testing verdicts and preorders."""

from .model import (IO, LTS, SUCCESS, Automaton, FiniteExecution, InvalidAutomaton,
                    LassoExecution, LassoWord, Signature, validate)
from .algebra import compose, check_compatibility, check_strong_compatibility
from .dsl import DslError, emit_dsl, load_dsl, parse_dsl
from .analysis import fair_emptiness, fair_trace_inclusion
from .verdicts import may, must_f, must_f_ab, must_pr, should, surv, min_fair_reward
from .preorders import (fair_preorder, may_preorder, must_f_preorder, quiescent_preorder,
                        reward_f_preorder, trace_preorder, witness_fair_must_test,
                        witness_may_test)

__version__ = "0.1.0"

__all__ = [
    "IO", "LTS", "SUCCESS", "Automaton", "FiniteExecution", "InvalidAutomaton",
    "LassoExecution", "LassoWord", "Signature", "validate",
    "compose", "check_compatibility", "check_strong_compatibility",
    "DslError", "emit_dsl", "load_dsl", "parse_dsl",
    "fair_emptiness", "fair_trace_inclusion",
    "may", "must_f", "must_f_ab", "must_pr", "should", "surv", "min_fair_reward",
    "fair_preorder", "may_preorder", "must_f_preorder", "quiescent_preorder",
    "reward_f_preorder", "trace_preorder", "witness_fair_must_test", "witness_may_test",
]
