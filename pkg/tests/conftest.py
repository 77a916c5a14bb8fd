import itertools
import os
import random

import pytest
from hypothesis import HealthCheck, settings

from qdk.graph import Multigraph

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", deadline=None, max_examples=500)
settings.load_profile(os.environ.get("QDK_HYPOTHESIS", "default"))


def random_graph(rng, n, p=0.5, max_mult=1):
    edges = [
        (u, v, rng.randint(1, max_mult))
        for u, v in itertools.combinations(range(n), 2)
        if rng.random() < p
    ]
    return Multigraph(n, edges)


def random_bipartite(rng, n1, n2, p=0.5, max_mult=1):
    edges = [
        (u, n1 + v, rng.randint(1, max_mult))
        for u in range(n1)
        for v in range(n2)
        if rng.random() < p
    ]
    return Multigraph(n1 + n2, edges, n_left=n1)


def cycle(mults):
    n = len(mults)
    return Multigraph(n, [(i, (i + 1) % n, k) for i, k in enumerate(mults)])


@pytest.fixture
def rng():
    return random.Random(12345)
