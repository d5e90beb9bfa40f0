import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from d2dcache.graphcore import (
    Graph, LexPaths, all_pairs_distances, betweenness_centrality, classical_centrality,
    closeness_centrality, degree_centrality, diameter, read_edge_list, shortest_path,
    write_edge_list,
)


@st.composite
def graphs(draw, max_nodes=8, directed=False, weighted=False):
    n = draw(st.integers(1, max_nodes))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v and (directed or u < v)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    if weighted:
        ws = draw(st.lists(st.sampled_from([0.0, 0.25, 0.5, 1.0, 1.5]), min_size=len(chosen), max_size=len(chosen)))
        return Graph(n, [(u, v, w) for (u, v), w in zip(chosen, ws)], directed=directed)
    return Graph(n, chosen, directed=directed)


def to_nx(g):
    h = nx.DiGraph() if g.directed else nx.Graph()
    h.add_nodes_from(range(g.node_count))
    h.add_weighted_edges_from(g.edges)
    return h


def test_rejects_bad_edges():
    with pytest.raises(ValueError):
        Graph(3, [(0, 0)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 1, -1.0)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 5)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 1), (0, 1, 2.0)])
    with pytest.raises(ValueError):
        Graph(3, [(0, 1), (0, 1)], directed=True)


def test_undirected_symmetric():
    g = Graph(3, [(0, 1, 0.5)])
    assert g.has_edge(1, 0) and g.weight(1, 0) == 0.5
    assert g.edge_count == 1


def test_lex_tiebreak_square():
    # 0-1-3 and 0-2-3 tie; the smaller intermediate wins
    g = Graph(4, [(0, 2), (0, 1), (2, 3), (1, 3)])
    assert shortest_path(g, 0, 3).nodes == (0, 1, 3)
    assert shortest_path(g, 3, 0).nodes == (3, 1, 0)
    assert LexPaths(g).path(0, 3) == [0, 1, 3]


def test_unreachable():
    g = Graph(3, [(0, 1)])
    assert shortest_path(g, 0, 2) is None
    assert LexPaths(g).first_hop(0, 2) == -1
    assert np.isinf(all_pairs_distances(g)[0, 2])


def test_weighted_tiebreak_prefers_fewer_hops():
    g = Graph(4, [(0, 1, 0.0), (1, 2, 1.0), (0, 3, 1.0), (3, 2, 0.0), (0, 2, 1.0)], directed=True)
    p = shortest_path(g, 0, 2, "weight")
    assert p.nodes == (0, 2) and p.weight_sum == 1.0


def test_centralities_on_path():
    g = Graph(3, [(0, 1), (1, 2)])
    assert degree_centrality(g).tolist() == [1, 2, 1]
    assert betweenness_centrality(g).tolist() == [0, 2, 0]
    assert closeness_centrality(g).tolist() == pytest.approx([2 / 3, 1.0, 2 / 3])
    with pytest.raises(ValueError):
        classical_centrality(g, "eigen")


def test_closeness_isolated_node_zero():
    assert closeness_centrality(Graph(3, [(0, 1)]))[2] == 0.0


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_lex_path_is_min_of_all_shortest(g):
    h = to_nx(g)
    lp = LexPaths(g)
    for s, t in itertools.permutations(range(g.node_count), 2):
        if nx.has_path(h, s, t):
            best = min(nx.all_shortest_paths(h, s, t))
            assert lp.path(s, t) == best
            assert list(shortest_path(g, s, t).nodes) == best
        else:
            assert lp.path(s, t) is None


@settings(max_examples=60, deadline=None)
@given(graphs(directed=True, weighted=True))
def test_weighted_distances_match_networkx(g):
    h = to_nx(g)
    d = all_pairs_distances(g, "weight")
    ref = dict(nx.all_pairs_dijkstra_path_length(h))
    for s in range(g.node_count):
        for t in range(g.node_count):
            if t in ref[s]:
                assert d[s, t] == pytest.approx(ref[s][t], abs=1e-12)
                p = shortest_path(g, s, t, "weight")
                assert p.weight_sum == pytest.approx(ref[s][t], abs=1e-12)
                assert sum(g.weight(a, b) for a, b in zip(p.nodes, p.nodes[1:])) == pytest.approx(p.weight_sum)
            else:
                assert np.isinf(d[s, t])


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_classical_match_networkx(g):
    h = to_nx(g)
    bc = nx.betweenness_centrality(h, normalized=False)
    # networkx counts each unordered pair once on undirected graphs
    assert betweenness_centrality(g) == pytest.approx([2 * bc[u] for u in range(g.node_count)])
    assert degree_centrality(g).tolist() == [h.degree(u) for u in range(g.node_count)]
    if g.node_count > 1 and nx.is_connected(h):
        cc = nx.closeness_centrality(h)
        assert closeness_centrality(g) == pytest.approx([cc[u] for u in range(g.node_count)])


@settings(max_examples=40, deadline=None)
@given(graphs(weighted=True))
def test_diameter_matches_networkx_on_components(g):
    h = to_nx(g)
    ref = max((dd for s, row in nx.all_pairs_dijkstra_path_length(h) for dd in row.values()), default=0.0)
    assert diameter(g, "weight") == pytest.approx(ref)


def test_edge_list_roundtrip(tmp_path):
    g = Graph(5, [(0, 1, 0.3), (1, 4, 2.0), (2, 3, 0.1)])
    write_edge_list(g, tmp_path / "e.csv")
    assert (tmp_path / "e.csv").read_text().splitlines()[0] == "src,dst,weight"
    assert read_edge_list(tmp_path / "e.csv", node_count=5) == g
    gd = Graph(3, [(0, 1, 0.5), (1, 0, 0.7)], directed=True)
    write_edge_list(gd, tmp_path / "d.csv")
    assert read_edge_list(tmp_path / "d.csv", node_count=3, directed=True) == gd
