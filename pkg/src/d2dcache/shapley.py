"""Shapley-value centralities, offloading power and per-community seed selection."""
import csv
from dataclasses import dataclass, field
from math import factorial

import numpy as np

from . import kernels
from .graphcore import LexPaths, classical_centrality
from .influence import d_neighborhoods
from .socialnet import CONNECTIVITY, INFLUENCE, build_line_graph

MAX_EXACT_PLAYERS = 12

SV = "SV"
SV_INFLUENCE = "SV:influence"
SV_CONNECTIVITY = "SV:connectivity"
METHODS = (SV, SV_INFLUENCE, SV_CONNECTIVITY, "degree", "betweenness", "closeness")
_LINE_KIND = {SV_INFLUENCE: INFLUENCE, SV_CONNECTIVITY: CONNECTIVITY}


@dataclass
class CharacteristicGame:
    """Transferable-utility game; ``value`` maps a frozenset of players to a real."""

    players: tuple
    value: callable


def exact_shapley(game):
    """Shapley values by full subset enumeration (at most 12 players).

    Returns a dict ``player -> value``.
    """
    players = tuple(game.players)
    n = len(players)
    if n > MAX_EXACT_PLAYERS:
        raise ValueError(
            f"{n} players exceeds the enumeration limit of {MAX_EXACT_PLAYERS}; "
            "use closed_form_sv for large graphs"
        )
    values = np.empty(1 << n)
    for mask in range(1 << n):
        values[mask] = game.value(frozenset(p for i, p in enumerate(players) if mask >> i & 1))
    if values[0] != 0.0:
        raise ValueError("the empty coalition must have value 0")
    weight = [factorial(s) * factorial(n - s - 1) / factorial(n) for s in range(n)]
    size = [bin(m).count("1") for m in range(1 << n)]
    out = {}
    for i, p in enumerate(players):
        bit = 1 << i
        total = 0.0
        for mask in range(1 << n):
            if not mask & bit:
                total += weight[size[mask]] * (values[mask | bit] - values[mask])
        out[p] = total
    return out


def closed_form_sv(graph, within, alpha=None):
    """Closed-form centrality: ``sum over n != k`` with ``C_k & C_{n,d}`` nonempty
    of ``alpha_n / (1 + |C_{n,d}|)``.

    ``C_k`` is the out-neighbourhood of ``k`` in ``graph``; ``within[n]`` is the
    boolean indicator of ``C_{n,d}``.
    """
    n = graph.node_count
    alpha = np.ones(n) if alpha is None else np.asarray(alpha, dtype=float)
    within = np.ascontiguousarray(within, dtype=bool)
    coef = alpha / (1.0 + within.sum(axis=1))
    indptr, indices, _ = graph.reverse_csr
    return kernels.cover_sums(indptr, indices, within, np.ascontiguousarray(coef, dtype=float))


def graph_sv(graph, d_fraction, alpha=None, transform="identity"):
    """Neighbourhoods at ``d_fraction`` of the weighted diameter, then closed-form SV."""
    within, _, _ = d_neighborhoods(graph, d_fraction=d_fraction, transform=transform)
    return closed_form_sv(graph, within, alpha)


def offloading_power(social, per_community_sv, line_sv):
    """Per-UE offloading power: within-community SV share times community SV.

    ``per_community_sv[l]`` is aligned with ``social.members[l]``. A community
    whose SVs sum to 0 splits uniformly; UEs in several communities keep the max.
    """
    out = np.zeros(social.n_ues)
    for l, mem in enumerate(social.members):
        sv = np.asarray(per_community_sv[l], dtype=float)
        total = sv.sum()
        share = sv / total if total > 0 else np.full(len(mem), 1.0 / len(mem))
        for ue, s in zip(mem, share):
            out[ue] = max(out[ue], s * line_sv[l])
    return out


@dataclass
class CentralityReport:
    """Per-UE scores for every seed-selection method."""

    sv_d2d: np.ndarray
    sv_social: list  # per community, aligned with members
    community_sv: dict  # line-graph kind -> (L,) array
    offloading_power: dict  # line-graph kind -> (N,) array
    classical: dict = field(default_factory=dict)  # kind -> (N,) array

    def score(self, method):
        if method == SV:
            return self.sv_d2d
        if method in _LINE_KIND:
            return self.offloading_power[_LINE_KIND[method]]
        if method in self.classical:
            return self.classical[method]
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")

    def sv_social_per_ue(self, social):
        out = np.zeros(social.n_ues)
        for l, mem in enumerate(social.members):
            for ue, v in zip(mem, self.sv_social[l]):
                out[ue] = max(out[ue], v)
        return out


def compute_centralities(d2d, social, ig, d_fraction, alpha=None, paths=None,
                         transform="identity", methods=METHODS):
    """Scores for all methods on one scenario.

    The D2D-level SV uses the influence graph's own neighbourhoods; social and
    line graphs each get neighbourhoods at ``d_fraction`` of their own diameter.
    """
    paths = LexPaths(d2d) if paths is None else paths
    alpha = np.ones(d2d.node_count) if alpha is None else np.asarray(alpha, dtype=float)
    sv_d2d = closed_form_sv(ig.graph, ig.within, alpha)
    sv_social = [
        graph_sv(social.social_graph(l), d_fraction, alpha[list(mem)], transform)
        for l, mem in enumerate(social.members)
    ]
    community_sv, power = {}, {}
    for method, kind in _LINE_KIND.items():
        if method not in methods:
            continue
        line = build_line_graph(social, d2d, kind, paths)
        community_sv[kind] = graph_sv(line, d_fraction, transform=transform)
        power[kind] = offloading_power(social, sv_social, community_sv[kind])
    classical = {m: classical_centrality(d2d, m) for m in methods if m not in (SV,) + tuple(_LINE_KIND)}
    return CentralityReport(sv_d2d, sv_social, community_sv, power, classical)


def _argmax_smallest_id(candidates, key):
    best = max(key(u) for u in candidates)
    return min(u for u in candidates if key(u) == best)


def select_seeds(report, social, method):
    """One seed per community: the member with the highest score, smallest id on ties.

    For the offloading-power methods, a community whose members all score 0
    (e.g. a single-community network) is ranked by within-community SV instead.
    """
    score = report.score(method)
    seeds = []
    for l, mem in enumerate(social.members):
        if method in _LINE_KIND and max(score[u] for u in mem) == 0.0:
            local = dict(zip(mem, report.sv_social[l]))
            seeds.append(_argmax_smallest_id(mem, local.__getitem__))
        else:
            seeds.append(_argmax_smallest_id(mem, lambda u: score[u]))
    return tuple(int(s) for s in seeds)


def write_report(report, social, seeds_by_method, path):
    """CSV rows ``ue_id,community_id,method,score,is_seed`` for every membership.

    ``path`` may also be an open text stream.
    """
    if hasattr(path, "write"):
        _report_rows(csv.writer(path), report, social, seeds_by_method)
        return
    with open(path, "w", newline="") as fh:
        _report_rows(csv.writer(fh), report, social, seeds_by_method)


def _report_rows(w, report, social, seeds_by_method):
    w.writerow(["ue_id", "community_id", "method", "score", "is_seed"])
    for method, seeds in seeds_by_method.items():
        score = report.score(method)
        for l, mem in enumerate(social.members):
            for ue in mem:
                w.writerow([ue, l, method, repr(float(score[ue])), int(seeds[l] == ue)])
