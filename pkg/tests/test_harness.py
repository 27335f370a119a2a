import json
import random

import pytest

from iofair import harness as H
from iofair import verdicts as V
from iofair.algebra import check_compatibility, compose, is_complementary
from iofair.analysis import is_strongly_convergent
from iofair.model import check


def test_generation_is_deterministic():
    p = H.GenParams(max_states=4)
    assert H.random_io_automaton(p, random.Random(5)) == H.random_io_automaton(p, random.Random(5))
    assert H.random_io_automaton(p) == H.random_io_automaton(p)


@pytest.mark.parametrize("seed", range(25))
def test_generated_automata_are_valid(seed):
    rng = random.Random(seed)
    for p in (H.GenParams(), H.GenParams(tasks="random", density=0.8),
              H.GenParams(ensure="strongly-convergent")):
        a = H.random_io_automaton(p, rng)
        assert not check(a)
        if p.ensure == "strongly-convergent":
            assert is_strongly_convergent(a)


def test_density_one_realises_every_local_action():
    a = H.random_io_automaton(H.GenParams(density=1.0), random.Random(3))
    for s in a.states:
        assert a.local <= a.enabled(s)


@pytest.mark.parametrize("seed", range(25))
def test_random_tests_are_admissible(seed):
    rng = random.Random(seed)
    p = H.GenParams()
    a = H.random_io_automaton(p, rng)
    for regime in V.REGIMES:
        t = H.random_test(p, a.signature, regime, rng)
        assert not check(t)
        assert V.admissible(a, a, t, regime).ok, regime
    comp = H.random_test(p, a.signature, "complementary", rng)
    assert is_complementary(comp, a.signature)
    empty = H.random_test(p, a.signature, "empty-input", rng)
    assert compose([empty, a]).inputs == set()
    lts = H.random_test(p, a.signature, "lts", rng)
    assert check_compatibility([lts, a]).ok


def test_pairs_share_a_signature():
    for i in range(20):
        a, b = H.random_pair(H.GenParams(), random.Random(i))
        assert a.signature[:2] == b.signature[:2]


def test_zero_trials_is_vacuous():
    r = H.run_suite("thm5_1", 0, 1)
    assert r.ok and r.trials == 0 and not r.stats


def test_unknown_suite():
    with pytest.raises(ValueError):
        H.run_suite("nope", 1)


@pytest.mark.parametrize("suite", H.SUITES)
def test_suites_are_replayable(suite):
    first = H.run_suite(suite, 5, 11).to_dict()
    second = H.run_suite(suite, 5, 11).to_dict()
    first.pop("runtime"), second.pop("runtime")
    assert first == second and first["ok"]
    json.dumps(first)


def test_failures_carry_replay_data():
    r = H.SuiteResult("x", 1, 9)
    a = H.random_io_automaton(H.GenParams(), random.Random(0))
    r.fail(0, "stage", "detail", (a,))
    (f,) = r.to_dict()["failures"]
    assert f["seed"] == 9 and f["automata"][0].startswith("automaton A")
