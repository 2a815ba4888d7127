from __future__ import annotations

import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from gncg.game import StrategyProfile  # noqa: E402
from gncg.hostgraph import HostGraph  # noqa: E402

ALPHAS = st.sampled_from([Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(4)])


@st.composite
def weight_matrices(draw, n_min=2, n_max=4, low=0, high=6):
    n = draw(st.integers(n_min, n_max))
    w = [[Fraction(0)] * n for _ in range(n)]
    for u in range(n):
        for v in range(u + 1, n):
            w[u][v] = w[v][u] = Fraction(draw(st.integers(low, high)), draw(st.sampled_from([1, 1, 2, 3])))
    return w


@st.composite
def profiles_for(draw, n):
    strategies = []
    for u in range(n):
        others = [x for x in range(n) if x != u]
        strategies.append(frozenset(draw(st.lists(st.sampled_from(others), unique=True, max_size=n - 1))) if others else frozenset())
    return StrategyProfile(tuple(strategies))


@st.composite
def host_and_profile(draw, n_min=2, n_max=4, low=0, high=6):
    w = draw(weight_matrices(n_min, n_max, low, high))
    return w, draw(profiles_for(len(w)))


def as_host(w) -> HostGraph:
    from gncg.hostgraph import build_general

    return build_general(w)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
