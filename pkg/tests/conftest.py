import random

import pytest

from curveavg.lattice import SparseSet


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


def box_instance(rng: random.Random, N: int, density: float = 0.45):
    """Random dense subsets of the parabolic box [-N,N] x [-N^2,N^2].

    Dense sampling keeps alpha and beta of order density*N, which is what
    the refinement pipeline needs to leave the trivial regime.
    """
    box = [(x, y) for x in range(-N, N + 1) for y in range(-N * N, N * N + 1)]
    size = int(len(box) * density)
    E = SparseSet(rng.sample(box, size), 2)
    F = SparseSet(rng.sample(box, size), 2)
    return E, F
