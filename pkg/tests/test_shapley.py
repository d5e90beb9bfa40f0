from itertools import permutations

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from d2dcache.graphcore import Graph, LexPaths
from d2dcache.influence import d_neighborhoods
from d2dcache.shapley import (
    METHODS, CentralityReport, CharacteristicGame, closed_form_sv, compute_centralities,
    exact_shapley, graph_sv, offloading_power, select_seeds, write_report,
)
from d2dcache.socialnet import SocialLayer, random_memberships, sample_social_layer

from helpers import random_instance


def permutation_shapley(players, value):
    """Average marginal contribution over all orderings."""
    out = {p: 0.0 for p in players}
    perms = list(permutations(players))
    for order in perms:
        s = frozenset()
        for p in order:
            out[p] += value(s | {p}) - value(s)
            s = s | {p}
    return {p: v / len(perms) for p, v in out.items()}


def test_additive_game():
    g = CharacteristicGame((1, 2), lambda s: float(len(s)))
    assert exact_shapley(g) == {1: 1.0, 2: 1.0}


def test_majority_game():
    phi = exact_shapley(CharacteristicGame((0, 1, 2), lambda s: 1.0 if len(s) >= 2 else 0.0))
    assert [phi[p] for p in range(3)] == pytest.approx([1 / 3] * 3, abs=1e-15)


def test_dummy_player():
    phi = exact_shapley(CharacteristicGame("abc", lambda s: float(len(s - {"c"})) ** 2))
    assert phi["c"] == 0.0


def test_guards():
    with pytest.raises(ValueError, match="closed_form_sv"):
        exact_shapley(CharacteristicGame(tuple(range(13)), lambda s: 0.0))
    with pytest.raises(ValueError):
        exact_shapley(CharacteristicGame((0,), lambda s: 1.0))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**31))
def test_matches_permutation_formula(n, seed):
    rng = np.random.default_rng(seed)
    table = {0: 0.0}
    for mask in range(1, 1 << n):
        table[mask] = float(rng.normal())
    value = lambda s: table[sum(1 << p for p in s)]
    a = exact_shapley(CharacteristicGame(tuple(range(n)), value))
    b = permutation_shapley(tuple(range(n)), value)
    assert [a[p] for p in range(n)] == pytest.approx([b[p] for p in range(n)], abs=1e-12)


def eq7_brute(g, d_fraction, alpha=None):
    """Term-by-term closed form with neighbourhoods from networkx."""
    h = nx.DiGraph()
    h.add_nodes_from(range(g.node_count))
    h.add_weighted_edges_from(g.edges)
    dist = dict(nx.all_pairs_dijkstra_path_length(h))
    diam = max((d for row in dist.values() for d in row.values()), default=0.0)
    d = d_fraction * diam
    C = {n: {m for m in range(g.node_count) if n in dist[m] and dist[m][n] <= d + 1e-12 * max(1, d)}
         for n in range(g.node_count)}
    alpha = np.ones(g.node_count) if alpha is None else alpha
    out = np.zeros(g.node_count)
    for k in range(g.node_count):
        ck = set(h.successors(k))
        for n in range(g.node_count):
            if n != k and ck & C[n]:
                out[k] += alpha[n] / (1 + len(C[n]))
    return out


def test_isolated_node_zero():
    g = Graph(3, [(0, 1)])
    assert graph_sv(g, 0.5)[2] == 0.0


def test_triangle_large_d():
    g = Graph(3, [(0, 1), (1, 2), (0, 2)])
    assert graph_sv(g, 1.0).tolist() == pytest.approx([0.5, 0.5, 0.5], abs=1e-15)


def test_star_hop_scope():
    g = Graph(5, [(0, i) for i in range(1, 5)])
    # unit weights, diameter 2, d = 1: C_{0,d} = all, C_{leaf,d} = {leaf, centre}
    phi = graph_sv(g, 0.5)
    # centre: every leaf's neighbourhood contains a neighbour of the centre -> 4 * 1/3
    # leaf: centre n=0 (1/6) plus the 3 other leaves (1/3 each)
    assert phi.tolist() == pytest.approx([4 / 3] + [1 / 6 + 1.0] * 4, abs=1e-15)
    assert phi == pytest.approx(eq7_brute(g, 0.5), abs=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_closed_form_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 12))
    edges = [(u, v, float(rng.random())) for u in range(n) for v in range(n) if u != v and rng.random() < 0.3]
    g = Graph(n, edges, directed=True)
    alpha = rng.random(n)
    frac = float(rng.uniform(0.1, 1.0))
    assert graph_sv(g, frac, alpha) == pytest.approx(eq7_brute(g, frac, alpha), abs=1e-12)


def test_offloading_power_examples():
    s = SocialLayer(5, [(0, 1, 2), (3, 4)], [{}, {}])
    sv = [np.array([0.5, 0.3, 0.2]), np.array([1.0, 1.0])]
    o = offloading_power(s, sv, np.array([1.8, 0.6]))
    assert o[:3].tolist() == pytest.approx([0.9, 0.54, 0.36], abs=1e-15)
    eq = offloading_power(SocialLayer(3, [(0, 1, 2)], [{}]), [np.ones(3)], np.array([2.0]))
    assert eq.tolist() == pytest.approx([2 / 3] * 3)
    zero = offloading_power(SocialLayer(2, [(0, 1)], [{}]), [np.zeros(2)], np.array([1.0]))
    assert zero.tolist() == [0.5, 0.5]


def test_single_community_falls_back_to_social_sv():
    d2d = Graph(4, [(0, 1), (1, 2), (2, 3)])
    s = SocialLayer(4, [(0, 1, 2, 3)], [{(0, 1): 0.2, (1, 2): 0.9, (2, 3): 0.3, (0, 3): 0.5}])
    from d2dcache.influence import build_influence_graph

    ig = build_influence_graph(d2d, s, 0.4)
    rep = compute_centralities(d2d, s, ig, 0.4)
    assert np.all(rep.score("SV:influence") == 0)
    expected = int(np.flatnonzero(rep.sv_social[0] == rep.sv_social[0].max())[0])
    assert select_seeds(rep, s, "SV:influence") == (expected,)


def test_seed_tie_rule():
    s = SocialLayer(8, [(2, 4, 7)], [{}])
    score = np.zeros(8)
    score[[4, 7, 2]] = [0.2, 0.9, 0.9]
    rep = CentralityReport(score, [np.zeros(3)], {}, {}, {})
    assert select_seeds(rep, s, "SV") == (2,)
    single = SocialLayer(1, [(0,)], [{}])
    assert select_seeds(CentralityReport(np.zeros(1), [np.zeros(1)], {}, {}), single, "SV") == (0,)


@pytest.mark.parametrize("seed", range(8))
def test_report_consistency(seed):
    d2d, social, ig = random_instance(seed, n=10, d_fraction=0.4)
    rep = compute_centralities(d2d, social, ig, 0.4)
    assert rep.sv_d2d == pytest.approx(closed_form_sv(ig.graph, ig.within), abs=0)
    for m in METHODS:
        seeds = select_seeds(rep, social, m)
        score = rep.score(m)
        for l, mem in enumerate(social.members):
            assert seeds[l] in mem
            if m not in ("SV:influence", "SV:connectivity") or max(score[u] for u in mem) > 0:
                best = max(score[u] for u in mem)
                assert seeds[l] == min(u for u in mem if score[u] == best)
    for kind, power in rep.offloading_power.items():
        assert np.all(power >= 0)
    # disjoint communities: the power ranking inside a community follows the social SV
    if all(len(set(a) & set(b)) == 0 for i, a in enumerate(social.members) for b in social.members[i + 1:]):
        for l, mem in enumerate(social.members):
            p = rep.offloading_power["influence"][list(mem)]
            if p.max() > 0:
                assert np.argmax(p) == np.argmax(rep.sv_social[l])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 1000), st.floats(0.1, 10.0))
def test_alpha_scale_invariance(seed, c):
    d2d, social, ig = random_instance(seed, d_fraction=0.4)
    alpha = np.random.default_rng(seed).random(d2d.node_count) + 0.1
    a = compute_centralities(d2d, social, ig, 0.4, alpha)
    b = compute_centralities(d2d, social, ig, 0.4, c * alpha)
    assert b.sv_d2d == pytest.approx(c * a.sv_d2d, rel=1e-12, abs=1e-15)
    for l in range(social.community_count):
        assert b.sv_social[l] == pytest.approx(c * a.sv_social[l], rel=1e-12, abs=1e-15)
    for m in ("SV", "SV:influence", "SV:connectivity"):
        assert select_seeds(a, social, m) == select_seeds(b, social, m)


def test_write_report(tmp_path):
    d2d, social, ig = random_instance(2, n=6, d_fraction=0.4)
    rep = compute_centralities(d2d, social, ig, 0.4)
    seeds = {m: select_seeds(rep, social, m) for m in METHODS}
    write_report(rep, social, seeds, tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "ue_id,community_id,method,score,is_seed"
    n_rows = len(METHODS) * sum(len(m) for m in social.members)
    assert len(lines) == 1 + n_rows
    assert sum(int(r.split(",")[-1]) for r in lines[1:]) == len(METHODS) * social.community_count
