import numpy as np
import pytest

from cmspress.shifts import ExplicitSpec, make_generator, truncate


@pytest.fixture
def full2():
    return truncate(ExplicitSpec(2, [(1, 1), (1, 2), (2, 1), (2, 2)]), 2)


@pytest.fixture
def two_cycle():
    return truncate(ExplicitSpec(2, [(1, 2), (2, 1)]), 2)


@pytest.fixture
def two_loops():
    return truncate(ExplicitSpec(2, [(1, 1), (2, 2)]), 2)


@pytest.fixture
def renewal():
    return make_generator("renewal")


def random_mixing_sft(n_vertices: int, seed: int):
    """A random explicit spec on n_vertices that truncates to a mixing SFT
    on the full vertex set; deterministic for a fixed seed."""
    from cmspress.shifts import is_topologically_mixing

    rng = np.random.default_rng(seed)
    while True:
        edges = [(i, j) for i in range(1, n_vertices + 1)
                 for j in range(1, n_vertices + 1) if rng.random() < 0.5]
        spec = ExplicitSpec(n_vertices, edges)
        t = truncate(spec, n_vertices)
        if len(t) == n_vertices and is_topologically_mixing(t):
            return t
