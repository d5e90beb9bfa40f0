"""One-hop influence, the influence graph, d-neighbourhoods and coalition values."""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .graphcore import Graph, LexPaths, diameter

TRANSFORMS = ("identity", "one-minus", "reciprocal")
INNER_TERMS = ("I_mn", "I_mj")
_D_TOL = 1e-12


def _transform_weight(kind):
    if kind == "identity":
        return lambda u, v, w: w
    if kind == "one-minus":
        return lambda u, v, w: 1.0 - min(max(w, 0.0), 1.0)
    if kind == "reciprocal":
        return lambda u, v, w: 1.0 / w if w > 0 else float("inf")
    raise ValueError(f"distance transform must be one of {TRANSFORMS}, got {kind!r}")


def d_neighborhoods(graph, d_fraction=None, d_value=None, transform="identity"):
    """d-distance neighbourhoods of every node.

    Returns ``(within, d, dist)`` where ``within[n, m]`` is true iff the
    weighted distance from ``m`` to ``n`` is at most ``d``. Exactly one of
    ``d_fraction`` (times the weighted diameter) or ``d_value`` must be given.
    """
    if (d_fraction is None) == (d_value is None):
        raise ValueError("give exactly one of d_fraction or d_value")
    g = graph.with_weights(_transform_weight(transform)) if transform != "identity" else graph
    if g.node_count == 0:
        return np.zeros((0, 0), dtype=bool), 0.0, np.zeros((0, 0))
    indptr, indices, weights = g.csr
    dist = kernels.dijkstra_all(indptr, indices, weights)
    if d_value is None:
        if d_fraction <= 0:
            raise ValueError("d_fraction must be positive")
        d_value = d_fraction * diameter(g, distances=dist)
    if d_value < 0:
        raise ValueError("d must be non-negative")
    within = (dist <= d_value + _D_TOL * max(1.0, d_value)).T
    return np.ascontiguousarray(within), float(d_value), dist


def influence_matrix(d2d, social, paths=None):
    """Dense ``I[m, n]``: sum of ``tie / path size`` over peers routed via neighbour ``n``.

    Paths are hop-shortest with lexicographic tie-break and exclude the source,
    so the only node of the path adjacent to ``m`` is its first hop.
    """
    paths = LexPaths(d2d) if paths is None else paths
    n = d2d.node_count
    out = np.zeros((n, n))
    for u, mem in enumerate(social.members):
        for (a, b), w in sorted(social.ties[u].items()):
            for m, peer in ((a, b), (b, a)):
                hop = paths.first_hop(m, peer)
                if hop >= 0:
                    out[m, hop] += w / paths.hops[m, peer]
    return out


def one_hop_influence(m, n, d2d, social, paths=None):
    if not d2d.has_edge(m, n):
        raise ValueError(f"UEs {m} and {n} are not D2D neighbours")
    paths = LexPaths(d2d) if paths is None else paths
    total = 0.0
    for u in social.communities_of(m):
        for peer in social.members[u]:
            if peer == m:
                continue
            w = social.tie(u, m, peer)
            if w > 0 and paths.first_hop(m, peer) == n:
                total += w / paths.hops[m, peer]
    return total


@dataclass
class InfluenceGraph:
    """Directed graph over UEs weighted by one-hop influence, plus neighbourhoods.

    ``graph`` carries raw influence (possibly above 1); probabilities used by
    the d-influence and the diffusion are clamped to [0, 1].
    """

    graph: Graph
    within: np.ndarray  # within[n, m]: m in C_{n,d}
    d_value: float
    distances: np.ndarray
    inner_term: str = "I_mn"
    distance_transform: str = "identity"

    @property
    def size(self):
        return self.graph.node_count

    @cached_property
    def one_hop(self):
        return [frozenset(self.graph.neighbors(u)) for u in range(self.size)]

    @cached_property
    def d_neighbors(self):
        return [frozenset(np.flatnonzero(self.within[n]).tolist()) for n in range(self.size)]

    @cached_property
    def prob_matrix(self):
        p = np.zeros((self.size, self.size))
        for u, v, w in self.graph.edges:
            p[u, v] = min(max(w, 0.0), 1.0)
        return p

    def influence(self, m, n):
        return self.graph.weight(m, n) if self.graph.has_edge(m, n) else 0.0

    @classmethod
    def from_weights(cls, node_count, weighted_edges, d_fraction=None, d_value=None,
                     distance_transform="identity", inner_term="I_mn"):
        """Build directly from ``(m, n, I_mn)`` triples."""
        if inner_term not in INNER_TERMS:
            raise ValueError(f"inner_term must be one of {INNER_TERMS}")
        g = Graph(node_count, weighted_edges, directed=True)
        within, d, dist = d_neighborhoods(g, d_fraction, d_value, distance_transform)
        return cls(g, within, d, dist, inner_term, distance_transform)


def build_influence_graph(d2d, social, d_fraction, distance_transform="identity",
                          inner_term="I_mn", paths=None):
    imat = influence_matrix(d2d, social, paths)
    edges = [(u, v, float(imat[u, v])) for u, v, _ in d2d.edges]
    return InfluenceGraph.from_weights(d2d.node_count, edges, d_fraction=d_fraction,
                                       distance_transform=distance_transform, inner_term=inner_term)


def d_influence(n, s, ig):
    """Expected number of ``C_{n,d}`` members reached by coalition ``s``."""
    s = set(s)
    if not s:
        return 0.0
    p = ig.prob_matrix
    focal = ig.inner_term == "I_mn"
    total = 0.0
    for j in sorted(ig.d_neighbors[n]):
        miss = 1.0
        for m in sorted(ig.one_hop[j] & s):
            miss *= 1.0 - (p[m, n] if focal else p[m, j])
        total += 1.0 - miss
    return total


def exclusive_influence(n, k, s, ig):
    """Marginal d-influence of member ``k`` of ``s`` on node ``n``."""
    s = set(s)
    if k not in s:
        raise ValueError(f"UE {k} is not in the coalition")
    return d_influence(n, s, ig) - d_influence(n, s - {k}, ig)


def coalition_value(s, ig, alpha=None):
    """Priced d-influence of ``s`` summed over the UEs outside it."""
    s = set(s)
    if not s:
        return 0.0
    alpha = np.ones(ig.size) if alpha is None else np.asarray(alpha, dtype=float)
    return sum(alpha[n] * d_influence(n, s, ig) for n in range(ig.size) if n not in s)
