from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from d2dcache.graphcore import Graph
from d2dcache.socialnet import (
    CONNECTIVITY, INFLUENCE, SocialLayer, build_line_graph, line_graph_weights,
    random_memberships, read_social_layer, sample_social_layer, validate_social_layer,
    write_memberships, write_ties,
)


def chain(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def test_sample_density():
    s = sample_social_layer([(0, 1, 2)], 1, 1.0)
    assert len(s.ties[0]) == 3 and all(0 < w <= 1 for w in s.ties[0].values())
    assert sample_social_layer([(0, 1, 2)], 1, 0.0).ties == [{}]
    assert sample_social_layer([(0, 1, 2), (3, 4)], 5).ties == sample_social_layer([(0, 1, 2), (3, 4)], 5).ties


def test_random_memberships_cover_and_nonempty():
    mem = random_memberships(30, 5, 2)
    assert sorted(u for m in mem for u in m) == list(range(30))
    assert all(mem)
    over = random_memberships(30, 5, 2, overlap=0.5)
    assert sum(len(m) for m in over) > 30


def test_validation_messages():
    ok = sample_social_layer([(0, 1), (2,)], 0)
    assert validate_social_layer(ok) == []
    bad = SocialLayer(4, [(0, 1), (2,)], [{(0, 1): 1.5}, {}])
    probs = validate_social_layer(bad)
    assert any("tie out of range" in p for p in probs)
    assert any("uncovered UE 3" in p for p in probs)
    cross = SocialLayer(3, [(0, 1), (2,)], [{(0, 2): 0.5}, {}])
    assert any("tie across communities" in p for p in validate_social_layer(cross))


def test_line_graph_chain_example():
    # chain 0-1-2-3-4, community u = {0, 4} tied 0.6, community v = {1, 2, 3}
    s = SocialLayer(5, [(0, 4), (1, 2, 3)], [{(0, 4): 0.6}, {(1, 2): 0.5}])
    d2d = chain(5)
    w_inf, w_con = line_graph_weights(s, d2d)
    assert w_inf[0, 1] == pytest.approx(1.8)
    assert w_con[0, 1] == 1
    # members of v route only through v itself
    assert w_con[1, 0] == 0 and w_inf[1, 0] == 0
    g = build_line_graph(s, d2d, INFLUENCE)
    assert g.edges == [(0, 1, pytest.approx(1.8))]


def test_line_graph_no_relays():
    s = SocialLayer(4, [(0, 1), (2, 3)], [{(0, 1): 0.5}, {(2, 3): 0.5}])
    d2d = Graph(4, [(0, 1), (2, 3), (1, 2)])
    assert build_line_graph(s, d2d, CONNECTIVITY).edge_count == 0


def test_untied_pairs_count_for_connectivity_only():
    s = SocialLayer(3, [(0, 2), (1,)], [{}, {}])
    w_inf, w_con = line_graph_weights(s, chain(3))
    assert w_con[0, 1] == 1 and w_inf[0, 1] == 0


def brute_line_weights(social, d2d):
    """Independent: enumerate paths via per-pair BFS over ascending neighbours."""
    from collections import deque

    def lexpath(a, b):
        prev = {a: None}
        q = deque([a])
        while q:
            u = q.popleft()
            for v in sorted(d2d.neighbors(u)):
                if v not in prev:
                    prev[v] = u
                    q.append(v)
        if b not in prev:
            return None
        p = [b]
        while p[-1] != a:
            p.append(prev[p[-1]])
        return p[::-1]

    L = social.community_count
    wi, wc = np.zeros((L, L)), np.zeros((L, L))
    for u in range(L):
        for a, b in combinations(social.members[u], 2):
            p = lexpath(a, b)
            if p is None:
                continue
            for v in range(L):
                if v == u:
                    continue
                hits = len(set(p[1:]) & set(social.members[v]))
                if hits:
                    wc[u, v] += 1
                    wi[u, v] += social.tie(u, a, b) * hits
    return wi, wc


@st.composite
def instances(draw):
    n = draw(st.integers(2, 9))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True))
    L = draw(st.integers(1, min(4, n)))
    seed = draw(st.integers(0, 2**31))
    overlap = draw(st.sampled_from([0.0, 0.3]))
    density = draw(st.sampled_from([0.5, 1.0]))
    mem = random_memberships(n, L, seed, overlap)
    return Graph(n, edges), sample_social_layer(mem, seed + 1, density, n)


@settings(max_examples=80, deadline=None)
@given(instances())
def test_line_weights_oracle_and_bounds(inst):
    d2d, s = inst
    wi, wc = line_graph_weights(s, d2d)
    ri, rc = brute_line_weights(s, d2d)
    assert np.allclose(wi, ri, atol=1e-12) and np.array_equal(wc, rc)
    for u, mem in enumerate(s.members):
        assert wc[u].max() <= len(mem) * (len(mem) - 1) // 2
    assert np.all(wi[wc == 0] == 0)


def test_line_graph_relabel_invariance():
    # a tree has unique shortest paths, so relabelling cannot change tie-breaks
    rng = np.random.default_rng(4)
    n = 10
    edges = [(i, int(rng.integers(0, i))) for i in range(1, n)]
    s = sample_social_layer(random_memberships(n, 3, 1), 2)
    perm = rng.permutation(n)
    d2 = Graph(n, [(perm[u], perm[v]) for u, v in edges])
    s2 = SocialLayer(n, [tuple(sorted(int(perm[u]) for u in m)) for m in s.members],
                     [{tuple(sorted((int(perm[a]), int(perm[b])))): w for (a, b), w in t.items()} for t in s.ties])
    a = line_graph_weights(s, Graph(n, edges))
    b = line_graph_weights(s2, d2)
    assert np.allclose(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_csv_roundtrip(tmp_path):
    s = sample_social_layer(random_memberships(12, 3, 1, overlap=0.2), 3, 0.7)
    write_memberships(s, tmp_path / "m.csv")
    write_ties(s, tmp_path / "t.csv")
    assert (tmp_path / "m.csv").read_text().startswith("ue_id,community_id\n")
    assert (tmp_path / "t.csv").read_text().startswith("community_id,ue_a,ue_b,weight\n")
    back = read_social_layer(tmp_path / "m.csv", tmp_path / "t.csv", 12)
    assert back.members == s.members and back.ties == s.ties


def test_social_graph_local_indices():
    s = SocialLayer(6, [(1, 3, 5)], [{(1, 5): 0.4}])
    g = s.social_graph(0)
    assert g.node_count == 3 and g.weight(0, 2) == 0.4 and g.weight(2, 0) == 0.4
