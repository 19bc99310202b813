import pytest

from grtc import OperatorPolicy, StrategySet, build_state


@pytest.fixture
def fig1():
    """Nine workers in three groups, current g1, successor g2.

    Sizes 3/2/4 with d=2; the worked example used throughout."""
    state = build_state(
        [("g1", ["w1", "w2", "w3"]),
         ("g2", ["w4", "w5"]),
         ("g3", ["w6", "w7", "w8", "w9"])],
        current="g1")
    assert not isinstance(state, tuple)
    return state


@pytest.fixture
def policy():
    return OperatorPolicy(d=2, max_multiplier=2)


@pytest.fixture
def strategies():
    return StrategySet.seeded("balanced", "pred-first", seed=0)


def make_state(spec, current):
    """spec: list of (gid, [tokens]) with seq = appearance order."""
    state = build_state(spec, current=current)
    assert hasattr(state, "ring"), f"invalid fixture state: {state}"
    return state
