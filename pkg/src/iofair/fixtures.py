"""Named example automata, written in the DSL.

FIG1_A / FIG1_B are the classic pair tau.(a+b) versus tau.a + tau.b;
FIG1_T offers b and then succeeds.  SEC6_A is a single idle state and
SEC6_B a single state with an internal self-loop.  SEC6_TEST takes one
internal step into a state where it can report success, which is enough
to separate the two under must-testing with the progress criterion: the
divergent SEC6_B may loop forever before the test moves.
"""

from __future__ import annotations

from .dsl import load_dsl

SOURCES = {
    "FIG1_A": """
automaton FIG1_A
  kind io
  outputs a b
  internals tau
  states p0 p1 p2 p3
  start p0
  trans p0 tau p1
  trans p1 a p2
  trans p1 b p3
end
""",
    "FIG1_B": """
automaton FIG1_B
  kind io
  outputs a b
  internals tau
  states q0 q1 q2 q3 q4
  start q0
  trans q0 tau q1
  trans q0 tau q2
  trans q1 a q3
  trans q2 b q4
end
""",
    # a is declared although no transition uses it: the test refuses a.
    "FIG1_T": """
automaton FIG1_T
  kind io
  outputs a b w
  states t0 t1 t2
  start t0
  trans t0 b t1
  trans t1 w t2
end
""",
    "SEC6_A": """
automaton SEC6_A
  kind io
  states s
  start s
end
""",
    "SEC6_B": """
automaton SEC6_B
  kind io
  internals tau
  states s
  start s
  task tau = tau
  trans s tau s
end
""",
    "SEC6_TEST": """
automaton SEC6_TEST
  kind io
  outputs w
  internals t
  states t0 t1
  start t0
  trans t0 t t1
  trans t1 w t1
end
""",
}


def get(name: str):
    try:
        src = SOURCES[name]
    except KeyError:
        raise KeyError("unknown fixture %r; known: %s" % (name, ", ".join(sorted(SOURCES)))) from None
    return load_dsl(src)[0]


def fig1():
    return get("FIG1_A"), get("FIG1_B"), get("FIG1_T")


def sec6():
    return get("SEC6_A"), get("SEC6_B"), get("SEC6_TEST")
