import pytest

from iofair import fixtures
from iofair.model import validate


@pytest.fixture
def fig1():
    return fixtures.fig1()


@pytest.fixture
def sec6():
    return fixtures.sec6()


def io(name="A", inputs=(), outputs=(), internals=(), states=("s0",), transitions=(), **kw):
    """Small helper to build validated automata inline."""
    raw = {"name": name, "kind": kw.pop("kind", "io"), "inputs": list(inputs),
           "outputs": list(outputs), "internals": list(internals), "states": list(states),
           "starts": kw.pop("starts", [states[0]]), "transitions": [list(t) for t in transitions]}
    raw.update(kw)
    return validate(raw)
