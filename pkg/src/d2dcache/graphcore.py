"""Weighted graph substrate: shortest paths, distances and classical centralities."""
import csv
import heapq
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels

HOPS = "hops"
WEIGHT = "weight"
_METRICS = (HOPS, WEIGHT)
_REL_TOL = 1e-12


class Graph:
    """Directed or undirected graph over nodes ``0..node_count-1``.

    Undirected edges may be given once; both directions are stored with equal
    weight. Self-loops, duplicates and negative weights are rejected.
    """

    def __init__(self, node_count, edges=(), directed=False):
        if node_count < 0:
            raise ValueError("node_count must be non-negative")
        self.node_count = int(node_count)
        self.directed = bool(directed)
        self._adj = [dict() for _ in range(self.node_count)]
        for edge in edges:
            u, v = int(edge[0]), int(edge[1])
            w = float(edge[2]) if len(edge) > 2 else 1.0
            self._check_node(u)
            self._check_node(v)
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not w >= 0.0:
                raise ValueError(f"negative or NaN weight on ({u}, {v})")
            if v in self._adj[u]:
                if self.directed or self._adj[u][v] != w:
                    raise ValueError(f"duplicate edge ({u}, {v})")
                continue
            self._adj[u][v] = w
            if not self.directed:
                self._adj[v][u] = w

    def _check_node(self, u):
        if not 0 <= u < self.node_count:
            raise ValueError(f"invalid node index {u}")

    @property
    def edges(self):
        """All stored ``(src, dst, weight)`` triples, both directions if undirected."""
        return [(u, v, self._adj[u][v]) for u in range(self.node_count) for v in sorted(self._adj[u])]

    @property
    def edge_count(self):
        n = sum(len(a) for a in self._adj)
        return n if self.directed else n // 2

    def neighbors(self, u):
        self._check_node(u)
        return sorted(self._adj[u])

    def has_edge(self, u, v):
        return v in self._adj[u]

    def weight(self, u, v):
        return self._adj[u][v]

    @cached_property
    def csr(self):
        """``(indptr, indices, weights)`` with ascending indices per row."""
        indptr = np.zeros(self.node_count + 1, dtype=np.int64)
        idx, wts = [], []
        for u in range(self.node_count):
            for v in sorted(self._adj[u]):
                idx.append(v)
                wts.append(self._adj[u][v])
            indptr[u + 1] = len(idx)
        return indptr, np.asarray(idx, dtype=np.int64), np.asarray(wts, dtype=float)

    @cached_property
    def reverse_csr(self):
        """CSR of the transposed graph: row ``v`` lists sources ``u`` of edges ``u -> v``."""
        rows = [[] for _ in range(self.node_count)]
        for u in range(self.node_count):
            for v, w in self._adj[u].items():
                rows[v].append((u, w))
        indptr = np.zeros(self.node_count + 1, dtype=np.int64)
        idx, wts = [], []
        for v in range(self.node_count):
            for u, w in sorted(rows[v]):
                idx.append(u)
                wts.append(w)
            indptr[v + 1] = len(idx)
        return indptr, np.asarray(idx, dtype=np.int64), np.asarray(wts, dtype=float)

    def with_weights(self, fn):
        """Copy with every weight replaced by ``fn(u, v, w)``; ``inf`` drops the edge."""
        out = []
        for u, v, w in self.edges:
            nw = fn(u, v, w)
            if math.isfinite(nw):
                out.append((u, v, nw))
        return Graph(self.node_count, out, directed=self.directed)

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.node_count == other.node_count
            and self.directed == other.directed
            and self.edges == other.edges
        )

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return f"Graph({self.node_count} nodes, {self.edge_count} edges, {kind})"


@dataclass(frozen=True)
class PathResult:
    nodes: tuple
    weight_sum: float

    @property
    def hop_count(self):
        return len(self.nodes) - 1


def _check_metric(metric):
    if metric not in _METRICS:
        raise ValueError(f"metric must be one of {_METRICS}, got {metric!r}")


def _tight(a, b):
    return abs(a - b) <= _REL_TOL * max(1.0, abs(a), abs(b))


def _bfs_from(g, src, reverse=False):
    indptr, indices, _ = g.reverse_csr if reverse else g.csr
    dist = [-1] * g.node_count
    dist[src] = 0
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for e in range(indptr[u], indptr[u + 1]):
            v = int(indices[e])
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def _dijkstra_from(indptr, indices, weights, src):
    dist = [math.inf] * (len(indptr) - 1)
    dist[src] = 0.0
    heap = [(0.0, src)]
    while heap:
        du, u = heapq.heappop(heap)
        if du > dist[u]:
            continue
        for e in range(indptr[u], indptr[u + 1]):
            v = int(indices[e])
            nd = du + weights[e]
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def shortest_path(g, src, dst, metric=HOPS):
    """Minimum path from ``src`` to ``dst``; ``None`` if unreachable.

    Ties are broken towards the lexicographically smallest node sequence.
    Under the weight metric, equal-weight paths are first narrowed to the
    fewest hops (this only matters when zero-weight edges create alternatives).
    """
    _check_metric(metric)
    g._check_node(src)
    g._check_node(dst)
    if metric == HOPS:
        to_dst = _bfs_from(g, dst, reverse=True)
        if to_dst[src] < 0:
            return None
        nodes = [src]
        u = src
        while u != dst:
            u = next(v for v in g.neighbors(u) if to_dst[v] == to_dst[u] - 1)
            nodes.append(u)
        return PathResult(tuple(nodes), float(len(nodes) - 1))

    rindptr, rindices, rweights = g.reverse_csr
    to_dst = _dijkstra_from(rindptr, rindices, rweights, dst)
    if not math.isfinite(to_dst[src]):
        return None
    # hop distances to dst inside the subgraph of tight (distance-preserving) edges
    tight_hops = [-1] * g.node_count
    tight_hops[dst] = 0
    queue = deque([dst])
    while queue:
        v = queue.popleft()
        for e in range(rindptr[v], rindptr[v + 1]):
            u = int(rindices[e])
            if tight_hops[u] < 0 and _tight(to_dst[u], rweights[e] + to_dst[v]):
                tight_hops[u] = tight_hops[v] + 1
                queue.append(u)
    nodes = [src]
    total = 0.0
    u = src
    while u != dst:
        for v in g.neighbors(u):
            w = g.weight(u, v)
            if tight_hops[v] == tight_hops[u] - 1 and _tight(to_dst[u], w + to_dst[v]):
                break
        total += w
        nodes.append(v)
        u = v
    return PathResult(tuple(nodes), total)


def all_pairs_distances(g, metric=HOPS):
    """Matrix ``d[src, dst]`` of shortest distances; ``inf`` when unreachable."""
    _check_metric(metric)
    if g.node_count == 0:
        return np.zeros((0, 0))
    indptr, indices, weights = g.csr
    if metric == HOPS:
        hops, _ = kernels.lex_trees(indptr, indices)
        out = hops.astype(float)
        out[hops < 0] = np.inf
        return out
    return kernels.dijkstra_all(indptr, indices, weights)


def diameter(g, metric=HOPS, distances=None):
    """Largest finite pairwise distance (0 for graphs without reachable pairs)."""
    d = all_pairs_distances(g, metric) if distances is None else distances
    finite = d[np.isfinite(d)]
    return float(finite.max()) if finite.size else 0.0


def degree_centrality(g):
    return np.array([len(g._adj[u]) for u in range(g.node_count)], dtype=float)


def closeness_centrality(g, distances=None):
    """``(N - 1) / sum of finite hop distances``; 0 for nodes that reach nobody."""
    d = all_pairs_distances(g, HOPS) if distances is None else distances
    n = g.node_count
    out = np.zeros(n)
    for u in range(n):
        row = d[u]
        total = row[np.isfinite(row)].sum()
        if total > 0:
            out[u] = (n - 1) / total
    return out


def betweenness_centrality(g):
    """Brandes betweenness over ordered pairs, counting every shortest path (hops)."""
    n = g.node_count
    indptr, indices, _ = g.csr
    adj = [indices[indptr[u]:indptr[u + 1]].tolist() for u in range(n)]
    bc = [0.0] * n
    for s in range(n):
        stack = []
        preds = [[] for _ in range(n)]
        sigma = [0] * n
        sigma[s] = 1
        dist = [-1] * n
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    return np.array(bc)


CLASSICAL = {
    "degree": degree_centrality,
    "betweenness": betweenness_centrality,
    "closeness": closeness_centrality,
}


def classical_centrality(g, kind):
    try:
        fn = CLASSICAL[kind]
    except KeyError:
        raise ValueError(f"unknown centrality {kind!r}; expected one of {sorted(CLASSICAL)}") from None
    return fn(g)


def write_edge_list(g, path):
    """Write ``src,dst,weight``; undirected edges appear once with ``src < dst``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["src", "dst", "weight"])
        for u, v, wt in g.edges:
            if g.directed or u < v:
                w.writerow([u, v, repr(wt)])


def read_edge_list(path, node_count=None, directed=False):
    with open(path, newline="") as fh:
        rows = [(int(r["src"]), int(r["dst"]), float(r["weight"])) for r in csv.DictReader(fh)]
    if node_count is None:
        node_count = 1 + max((max(u, v) for u, v, _ in rows), default=-1)
    return Graph(node_count, rows, directed=directed)


class LexPaths:
    """All-sources hop-shortest paths with lexicographic tie-breaking.

    ``path(src, dst)`` matches ``shortest_path(g, src, dst, "hops").nodes``
    but reuses one BFS tree per source.
    """

    def __init__(self, g):
        indptr, indices, _ = g.csr
        self.hops, self.parent = kernels.lex_trees(indptr, indices)

    def path(self, src, dst):
        if self.hops[src, dst] < 0:
            return None
        row = self.parent[src]
        out = [dst]
        while out[-1] != src:
            out.append(int(row[out[-1]]))
        out.reverse()
        return out

    def first_hop(self, src, dst):
        """Second node of the path from ``src`` to ``dst`` (``-1`` if none)."""
        if src == dst or self.hops[src, dst] < 0:
            return -1
        row = self.parent[src]
        v = dst
        while row[v] != src:
            v = int(row[v])
        return v
