import numpy as np
import pytest

from markovgeo import build_graph


@pytest.fixture
def two_state():
    """Complete graph on 2 states, edges (0,0),(0,1),(1,0),(1,1)."""
    return build_graph(2, [(0, 0), (0, 1), (1, 0), (1, 1)])


@pytest.fixture
def two_cycle():
    return build_graph(2, [(0, 1), (1, 0)])


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))
