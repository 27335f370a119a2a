import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from iofair import fixtures
from iofair.dsl import DslError, dump_json, emit_dsl, load_dsl, load_json, parse_dsl
from iofair.harness import GenParams, random_io_automaton
from iofair.model import InvalidAutomaton, validate


def test_fixture_source_parses_to_the_fixture(fig1):
    a = fig1[0]
    raw = parse_dsl(fixtures.SOURCES["FIG1_A"])[0]
    assert validate(raw) == a
    assert raw["starts"] == ["p0"] and raw["kind"] == "io"


def test_emit_parse_round_trip(fig1, sec6):
    for x in fig1 + sec6:
        assert load_dsl(emit_dsl(x)) == [x]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_round_trip_random(seed):
    a = random_io_automaton(GenParams(tasks="random"), random.Random(seed))
    assert load_dsl(emit_dsl(a)) == [a]
    assert load_json(dump_json([a])) == [a]


def test_rewards_and_comments():
    text = """
    # a test with a reward
    automaton T   # trailing comment
      outputs w
      internals t
      states t0 t1
      start t0
      trans t0 t t1 reward 1.5
      trans t1 w t1
    end
    """
    (t,) = load_dsl(text)
    assert t.reward("t0", "t", "t1") == 1.5
    assert "trans t0 t t1 reward 1.5" in emit_dsl(t)


def test_several_blocks():
    text = fixtures.SOURCES["SEC6_A"] + fixtures.SOURCES["SEC6_B"]
    assert [a.name for a in load_dsl(text)] == ["SEC6_A", "SEC6_B"]


@pytest.mark.parametrize("body,line,needle", [
    ("automaton X\n  outputs a\n  states s\n  start s\n  trans s b s\nend\n", 5, "undeclared action"),
    ("automaton X\n  outputs a\n  states s\n  start s\n  trans s a q\nend\n", 5, "undeclared state"),
    ("automaton X\n  outputs a\n  outputs b\nend\n", 3, "duplicate 'outputs'"),
    ("automaton X\n  kind io\n  kind lts\nend\n", 3, "duplicate 'kind'"),
    ("automaton X\n  outputs a\n  task t = a\n  task t = a\nend\n", 4, "duplicate task"),
    ("automaton X\n  frobnicate\nend\n", 2, "unknown keyword"),
    ("automaton X\n  states s\n", 1, "missing 'end'"),
    ("states s\n", 1, "expected 'automaton NAME'"),
    ("automaton X\n  trans s a\nend\n", 2, "expected 'trans"),
    ("automaton X\n  outputs a\n  states s\n  start s\n  trans s a s reward x\nend\n", 5, "bad reward"),
])
def test_positioned_errors(body, line, needle):
    with pytest.raises(DslError) as exc:
        parse_dsl(body)
    assert exc.value.line == line and needle in str(exc.value)


def test_semantic_errors_come_from_validation():
    text = "automaton X\n  inputs i\n  states s\n  start s\nend\n"
    with pytest.raises(InvalidAutomaton, match="MissingInputEnabling"):
        load_dsl(text)
    with pytest.raises(InvalidAutomaton, match="ReservedAction"):
        load_dsl("automaton X\n  inputs w\n  states s\n  start s\n  trans s w s\nend\n")


def test_json_shapes(fig1):
    a = fig1[0]
    one = json.dumps(a.to_dict())
    assert load_json(one) == [a]
    assert load_json(json.dumps([a.to_dict()])) == [a]
    assert load_json(dump_json([a])) == [a]
