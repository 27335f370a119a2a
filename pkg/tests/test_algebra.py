import pytest

from iofair.algebra import (IncompatibleComponents, ModeMismatch, WNotPresent, check_compatibility,
                            check_strong_compatibility, code_as_reward, complementarize, compose,
                            hide_for_testing, is_complementary, prune_success,
                            reclass_inputs_to_outputs, saturate_inputs, success_states)
from iofair.model import LTS, check

from conftest import io


def test_io_test_for_fig1_is_not_strongly_compatible(fig1):
    a, _, t = fig1
    rep = check_strong_compatibility([t, a])
    assert not rep.ok
    assert {act for k, act, _ in rep.violations if k == "output-shared"} == {"a", "b"}
    with pytest.raises(IncompatibleComponents):
        compose([t, a])


def test_strong_compatibility_needs_io(fig1):
    t = fig1[2].replace(kind=LTS, tasks={})
    with pytest.raises(ModeMismatch):
        check_strong_compatibility([t, fig1[0]])


def test_sec6_test_is_compatible(sec6):
    a, _, t = sec6
    assert check_strong_compatibility([t, a]).ok


def test_internal_clash_is_a_violation():
    x = io("X", internals=["h"], transitions=[("s0", "h", "s0")])
    y = io("Y", outputs=["h"], transitions=[("s0", "h", "s0")])
    assert [k for k, *_ in check_compatibility([x, y]).violations] == ["internal-shared"]


def test_lts_composition_of_fig1(fig1):
    a, b, t = fig1
    p = compose([t, a], kind="lts")
    assert p.kind == LTS
    assert set(p.states) == {"t0.p0", "t0.p1", "t1.p3", "t2.p3"}
    assert p.transitions == {("t0.p0", "tau", "t0.p1"), ("t0.p1", "b", "t1.p3"),
                             ("t1.p3", "w", "t2.p3")}
    q = compose([t, b], kind="lts")
    assert "t0.q1" in q.states and not q.successors("t0.q1")


def test_hide_keeps_only_success_external(fig1):
    a, _, t = fig1
    h = hide_for_testing(compose([t, a], kind="lts"))
    assert h.external == {"w"} and h.internals == {"tau", "a", "b"}


def test_io_composition_classifies_and_prefixes_tasks():
    x = io("X", inputs=["i"], outputs=["o"], transitions=[("s0", "i", "s0"), ("s0", "o", "s0")])
    y = io("Y", inputs=["o"], outputs=["i"], states=["r0", "r1"],
           transitions=[("r0", "o", "r1"), ("r1", "o", "r1"), ("r0", "i", "r0")])
    p = compose([x, y])
    assert p.inputs == set() and p.outputs == {"i", "o"}
    assert set(p.tasks) == {"X:o", "Y:i"}
    assert p.parts["s0.r1"] == ("s0", "r1")
    assert not check(p)


def test_composed_rewards_are_summed():
    x = io("X", outputs=["o"], transitions=[("s0", "o", "s0", 1.0)])
    y = io("Y", inputs=["o"], transitions=[("s0", "o", "s0", 2.0)])
    assert compose([x, y]).reward("s0.s0", "o", "s0.s0") == 3.0


def test_state_name_collision_is_detected():
    x = io("X", outputs=["o"], states=["a.b", "a"], transitions=[("a.b", "o", "a")])
    y = io("Y", inputs=["o"], states=["c", "b.c"], transitions=[("c", "o", "b.c"), ("b.c", "o", "b.c")])
    with pytest.raises(ValueError, match="collide"):
        compose([x, y])


def test_saturation_and_complementarize(fig1):
    a = fig1[0]
    t = io("T", outputs=["w"], internals=["u"], states=["t0", "t1"],
           transitions=[("t0", "u", "t1"), ("t1", "w", "t1")])
    sat = saturate_inputs(t, a.external)
    assert sat.inputs == {"a", "b"} and ("t0", "a", "t0") in sat.transitions
    comp = complementarize(sat, a.signature)
    assert is_complementary(comp, a.signature)
    with pytest.raises(WNotPresent):
        complementarize(a, a.signature)


def test_reclassify_inputs():
    t = io("T", inputs=["x"], outputs=["w"], transitions=[("s0", "x", "s0"), ("s0", "w", "s0")])
    r = reclass_inputs_to_outputs(t, {"x"})
    assert r.outputs == {"x", "w"} and r.task_of("x") is not None
    with pytest.raises(ValueError):
        reclass_inputs_to_outputs(t, {"w"})


def test_prune_success_drops_moves_out_of_success_states():
    t = io("T", inputs=["i"], outputs=["w", "o"], states=["t0", "t1"],
           transitions=[("t0", "i", "t1"), ("t1", "i", "t0"), ("t1", "w", "t1"), ("t1", "o", "t0")])
    assert success_states(t) == {"t1"}
    p = prune_success(t)
    assert p.successors("t1") == (("i", "t1"), ("w", "t1"))
    assert not check(p)


def test_code_as_reward_marks_entry_into_success(sec6):
    t = sec6[2]
    r = code_as_reward(t)
    assert r.rewards == {("t0", "t", "t1"): 1.0}
    assert code_as_reward(t, "surv").rewards == {("t0", "t", "t1"): -1.0}
    assert code_as_reward(sec6[0]).rewards == {}
