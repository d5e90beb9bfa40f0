"""Community layer: weighted social graphs, hypergraph membership and line graphs."""
import csv
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .graphcore import Graph, LexPaths

INFLUENCE = "influence"
CONNECTIVITY = "connectivity"


@dataclass
class SocialLayer:
    """Communities over UEs ``0..n_ues-1`` with per-community symmetric ties.

    ``ties[l]`` maps an ordered key ``(a, b)`` with ``a < b`` to a weight in (0, 1].
    """

    n_ues: int
    members: list  # per community: sorted tuple of UE ids
    ties: list  # per community: {(a, b): weight}

    @property
    def community_count(self):
        return len(self.members)

    def tie(self, community, a, b):
        """Tie weight inside ``community``; 0.0 if the pair has no tie."""
        if a > b:
            a, b = b, a
        return self.ties[community].get((a, b), 0.0)

    def communities_of(self, ue):
        return [l for l, mem in enumerate(self.members) if ue in mem]

    def membership_matrix(self):
        """Boolean ``(L, N)`` matrix, ``True`` where the UE belongs to the community."""
        out = np.zeros((self.community_count, self.n_ues), dtype=bool)
        for l, mem in enumerate(self.members):
            out[l, list(mem)] = True
        return out

    def social_graph(self, community):
        """Weighted undirected graph over the community's members, by local index."""
        mem = self.members[community]
        local = {ue: i for i, ue in enumerate(mem)}
        edges = [(local[a], local[b], w) for (a, b), w in sorted(self.ties[community].items())]
        return Graph(len(mem), edges, directed=False)


def random_memberships(n_ues, community_count, rng_seed, overlap=0.0):
    """Assign UEs uniformly at random to communities, none left empty.

    With ``overlap > 0`` each UE also joins every other community independently
    with that probability.
    """
    if community_count < 1 or community_count > n_ues:
        raise ValueError("need 1 <= community_count <= n_ues")
    rng = np.random.default_rng(rng_seed)
    label = rng.integers(0, community_count, size=n_ues)
    label[rng.permutation(n_ues)[:community_count]] = np.arange(community_count)
    groups = [set(np.flatnonzero(label == l).tolist()) for l in range(community_count)]
    if overlap > 0:
        extra = rng.random((community_count, n_ues)) < overlap
        for l in range(community_count):
            groups[l].update(np.flatnonzero(extra[l]).tolist())
    return [tuple(sorted(g)) for g in groups]


def sample_social_layer(memberships, rng_seed, tie_density=1.0, n_ues=None):
    """Draw ties inside each community: present w.p. ``tie_density``, weight U(0, 1]."""
    members = [tuple(sorted(set(int(u) for u in mem))) for mem in memberships]
    if n_ues is None:
        n_ues = 1 + max((max(m) for m in members if m), default=-1)
    rng = np.random.default_rng(rng_seed)
    ties = []
    for mem in members:
        pairs = list(combinations(mem, 2))
        present = rng.random(len(pairs)) < tie_density
        weight = 1.0 - rng.random(len(pairs))  # (0, 1]
        ties.append({p: float(w) for p, keep, w in zip(pairs, present, weight) if keep})
    return SocialLayer(int(n_ues), members, ties)


def validate_social_layer(social):
    """List of invariant violations; empty when the layer is valid."""
    problems = []
    covered = set()
    for l, mem in enumerate(social.members):
        if not mem:
            problems.append(f"empty community {l}")
        mset = set(mem)
        covered.update(mset)
        for (a, b), w in social.ties[l].items():
            if not 0.0 < w <= 1.0:
                problems.append(f"tie out of range: community {l} ({a}, {b}) weight {w}")
            if a not in mset or b not in mset:
                problems.append(f"tie across communities: community {l} ({a}, {b})")
            if a >= b:
                problems.append(f"tie key not ordered: community {l} ({a}, {b})")
    for ue in range(social.n_ues):
        if ue not in covered:
            problems.append(f"uncovered UE {ue}")
    extra = sorted(u for u in covered if not 0 <= u < social.n_ues)
    for ue in extra:
        problems.append(f"unknown UE {ue}")
    return problems


def line_graph_weights(social, d2d, paths=None):
    """Influence and connectivity weight matrices ``(L, L)`` of the hypergraph.

    For every unordered member pair of community ``u`` joined by a hop-shortest
    D2D path (walked from the smaller id, source excluded), each other community
    ``v`` met by the path gains one connectivity unit and ``tie * |path & v|``
    influence units.
    """
    paths = LexPaths(d2d) if paths is None else paths
    member = social.membership_matrix().astype(np.int64)
    n_comm = social.community_count
    w_inf = np.zeros((n_comm, n_comm))
    w_con = np.zeros((n_comm, n_comm), dtype=np.int64)
    for u, mem in enumerate(social.members):
        for a, b in combinations(mem, 2):
            p = paths.path(a, b)
            if p is None:
                continue
            hits = member[:, p[1:]].sum(axis=1)
            hits[u] = 0
            met = hits > 0
            w_con[u, met] += 1
            w_inf[u, met] += social.tie(u, a, b) * hits[met]
    return w_inf, w_con


def build_line_graph(social, d2d, kind, paths=None):
    """Directed weighted graph over community indices; zero-weight edges omitted."""
    if kind not in (INFLUENCE, CONNECTIVITY):
        raise ValueError(f"kind must be {INFLUENCE!r} or {CONNECTIVITY!r}")
    w_inf, w_con = line_graph_weights(social, d2d, paths)
    w = w_inf if kind == INFLUENCE else w_con
    src, dst = np.nonzero(w)
    return Graph(social.community_count, [(u, v, float(w[u, v])) for u, v in zip(src, dst)], directed=True)


def write_memberships(social, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["ue_id", "community_id"])
        rows = sorted((ue, l) for l, mem in enumerate(social.members) for ue in mem)
        w.writerows(rows)


def write_ties(social, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["community_id", "ue_a", "ue_b", "weight"])
        for l, ties in enumerate(social.ties):
            for (a, b), wt in sorted(ties.items()):
                w.writerow([l, a, b, repr(wt)])


def read_memberships(path):
    """Per-community member tuples, communities indexed by sorted community_id."""
    groups = {}
    with open(path, newline="") as fh:
        for r in csv.DictReader(fh):
            groups.setdefault(int(r["community_id"]), set()).add(int(r["ue_id"]))
    ids = sorted(groups)
    return [tuple(sorted(groups[c])) for c in ids], ids


def read_social_layer(membership_path, ties_path, n_ues=None):
    """Load a layer from membership and ties CSVs (e.g. exported social data)."""
    members, ids = read_memberships(membership_path)
    index = {c: i for i, c in enumerate(ids)}
    ties = [dict() for _ in members]
    if ties_path:
        with open(ties_path, newline="") as fh:
            for r in csv.DictReader(fh):
                a, b = int(r["ue_a"]), int(r["ue_b"])
                if a > b:
                    a, b = b, a
                ties[index[int(r["community_id"])]][(a, b)] = float(r["weight"])
    if n_ues is None:
        n_ues = 1 + max(max(m) for m in members)
    return SocialLayer(int(n_ues), members, ties)
