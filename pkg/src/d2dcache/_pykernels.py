"""Pure-Python kernels. Reference semantics for the compiled ``_ckernels``.

Every function here has a twin in ``_ckernels.pyx`` with the same signature
and bit-identical results. Graphs arrive in CSR form (``indptr``, ``indices``,
``weights``) with column indices sorted ascending inside each row.
"""
import heapq
from collections import deque

import numpy as np


def lex_trees(indptr, indices):
    """Hop distances and lexicographically smallest shortest-path trees.

    BFS with a FIFO queue over ascending adjacency visits each level in the
    rank order of its lex-smallest paths, so the first parent to reach a
    node is the one on its lex-smallest shortest path.

    Returns ``(dist, parent)``, both ``int64`` of shape ``(N, N)`` indexed
    ``[src, node]``; ``-1`` marks unreachable nodes and tree roots.
    """
    n = len(indptr) - 1
    dist = np.full((n, n), -1, dtype=np.int64)
    parent = np.full((n, n), -1, dtype=np.int64)
    ip = indptr.tolist()
    ix = indices.tolist()
    for src in range(n):
        drow = [-1] * n
        prow = [-1] * n
        drow[src] = 0
        queue = deque([src])
        while queue:
            u = queue.popleft()
            du = drow[u] + 1
            for e in range(ip[u], ip[u + 1]):
                v = ix[e]
                if drow[v] < 0:
                    drow[v] = du
                    prow[v] = u
                    queue.append(v)
        dist[src] = drow
        parent[src] = prow
    return dist, parent


def dijkstra_all(indptr, indices, weights):
    """All-pairs weighted distances, ``out[src, dst]``; ``inf`` if unreachable."""
    n = len(indptr) - 1
    out = np.full((n, n), np.inf)
    ip = indptr.tolist()
    ix = indices.tolist()
    wt = weights.tolist()
    inf = float("inf")
    for src in range(n):
        dist = [inf] * n
        done = [False] * n
        dist[src] = 0.0
        heap = [(0.0, src)]
        while heap:
            du, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            for e in range(ip[u], ip[u + 1]):
                v = ix[e]
                nd = du + wt[e]
                if nd < dist[v]:
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
        out[src] = dist
    return out


def cover_sums(in_indptr, in_indices, within, coef):
    """Accumulate ``coef[n]`` onto every ``k != n`` whose out-neighbourhood
    meets row ``n`` of the boolean matrix ``within``.

    ``in_indptr``/``in_indices`` is the CSR of the *reversed* graph, so row
    ``j`` lists the nodes that have ``j`` as an out-neighbour.
    """
    n = len(in_indptr) - 1
    phi = np.zeros(n)
    ip = in_indptr.tolist()
    ix = in_indices.tolist()
    stamp = [-1] * n
    acc = [0.0] * n
    for target in range(n):
        c = float(coef[target])
        hit = []
        for j in np.flatnonzero(within[target]).tolist():
            for e in range(ip[j], ip[j + 1]):
                k = ix[e]
                if stamp[k] != target:
                    stamp[k] = target
                    hit.append(k)
        for k in hit:
            if k != target:
                acc[k] += c
    phi[:] = acc
    return phi


def spread_one_attempt(indptr, indices, probs, holders, eligible, u_choice, u_success):
    """One slot of the one-attempt-per-holder spreading rule.

    Each holder of content ``c`` picks one eligible non-holding neighbour with
    probability proportional to ``probs`` and succeeds with that same
    probability. Returns the updated ``(L, N)`` holder matrix.
    """
    n_contents, n = holders.shape
    out = holders.copy()
    ip = indptr.tolist()
    ix = indices.tolist()
    pr = probs.tolist()
    for c in range(n_contents):
        hold = holders[c]
        elig = eligible[c]
        for m in np.flatnonzero(hold).tolist():
            cand = []
            total = 0.0
            for e in range(ip[m], ip[m + 1]):
                v = ix[e]
                if not hold[v] and elig[v] and pr[e] > 0.0:
                    cand.append(e)
                    total += pr[e]
            if not cand:
                continue
            thresh = u_choice[c, m] * total
            cum = 0.0
            pick = cand[-1]
            for e in cand:
                cum += pr[e]
                if thresh < cum:
                    pick = e
                    break
            if u_success[c, m] < pr[pick]:
                out[c, ix[pick]] = 1
    return out


def spread_cascade(indptr, indices, probs, holders, eligible, u_edge):
    """One slot of the attempt-every-neighbour (independent cascade) rule."""
    n_contents, n = holders.shape
    out = holders.copy()
    ip = indptr.tolist()
    ix = indices.tolist()
    pr = probs.tolist()
    for c in range(n_contents):
        hold = holders[c]
        elig = eligible[c]
        for m in np.flatnonzero(hold).tolist():
            for e in range(ip[m], ip[m + 1]):
                v = ix[e]
                if not hold[v] and elig[v] and u_edge[c, e] < pr[e]:
                    out[c, v] = 1
    return out
