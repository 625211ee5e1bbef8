import numpy as np
import pytest

from spinmix.model import Graph, TwoSpinSystem, gibbs_distribution


@pytest.fixture
def hardcore_edge():
    g = Graph(2, ((0, 1),))
    return TwoSpinSystem.uniform(g, 0.0, 1.0, 1.0)


@pytest.fixture
def hardcore_triangle():
    return TwoSpinSystem.uniform(Graph.complete(3), 0.0, 1.0, 1.0)


def random_system(rng: np.random.Generator, n_max: int = 5, hardcore_prob: float = 0.4,
                  uniform_field: bool = False) -> TwoSpinSystem:
    """Small random anti-ferromagnetic system for property tests."""
    n = int(rng.integers(2, n_max + 1))
    g = Graph.random(n, 0.55, int(rng.integers(0, 2**31)))
    if not g.edges:
        g = Graph(n, ((0, 1),))
    if rng.random() < hardcore_prob:
        beta = 0.0
        gamma = float(rng.uniform(0.4, 2.0))
    else:
        beta = float(rng.uniform(0.05, 0.9))
        gamma = float(rng.uniform(beta + 0.05, 1.0 / beta - 0.05))
        if beta * gamma >= 1.0:
            gamma = 0.9 / beta
    if uniform_field:
        fields = (float(rng.uniform(0.2, 3.0)),) * n
    else:
        fields = tuple(float(x) for x in rng.uniform(0.2, 3.0, size=n))
    return TwoSpinSystem(g, beta, gamma, fields)


def dist_of(sys):
    return gibbs_distribution(sys)
