import numpy as np
import pytest

import coarselab as cl


@pytest.fixture(scope="session")
def z21():
    return cl.segment_space(-10, 10)


@pytest.fixture(scope="session")
def z201():
    return cl.segment_space(-100, 100)


@pytest.fixture(scope="session")
def ray201():
    return cl.segment_space(0, 200)


@pytest.fixture(scope="session")
def neg201(z201):
    return cl.negation_action(z201)


def cycle_space(n):
    """Standalone cycle of n points with the cycle metric."""
    idx = np.arange(n)
    diff = np.abs(idx[:, None] - idx[None, :])
    return cl.FiniteSpace(list(range(n)), np.minimum(diff, n - diff), 0, n // 2, validate=False)


def rotation_action(space):
    n = len(space.points)
    return cl.GroupAction(space, {"r": {p: (p + 1) % n for p in space.points}})
