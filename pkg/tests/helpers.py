"""Shared random-instance builders for the tests."""
import numpy as np

from d2dcache.graphcore import Graph
from d2dcache.influence import build_influence_graph
from d2dcache.socialnet import random_memberships, sample_social_layer


def random_d2d(rng, n, p=0.35):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph(n, edges)


def random_instance(seed, n=None, d_fraction=None, inner_term="I_mn"):
    """D2D graph, social layer and influence graph with random ties and d."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 11)) if n is None else n
    d2d = random_d2d(rng, n)
    L = int(rng.integers(1, min(n, 4) + 1))
    social = sample_social_layer(random_memberships(n, L, rng.integers(2**31), 0.2), rng.integers(2**31),
                                 float(rng.choice([0.6, 1.0])), n)
    d_fraction = float(rng.uniform(0.05, 1.0)) if d_fraction is None else d_fraction
    ig = build_influence_graph(d2d, social, d_fraction, inner_term=inner_term)
    return d2d, social, ig
