from itertools import combinations

import networkx as nx
import pytest

from colorlab.errors import PreconditionError, UnknownNodeError
from colorlab.graph_core import LabeledGraph
from colorlab.topologies import (ImplicitGridHost, build_gadget_chain, build_grid,
                                 build_k_tree, build_layered, build_triangular,
                                 column_walk, row_walk, triangular_adjacent)

from brute import triangles


@pytest.mark.parametrize("a,b,wr,wc,n,m", [
    (3, 3, True, True, 9, 18),
    (3, 3, False, False, 9, 12),
    (2, 5, False, True, 10, 15),
    (1, 2, True, True, 2, 1),
    (1, 1, False, False, 1, 0),
])
def test_grid_counts(a, b, wr, wc, n, m):
    h = build_grid(a, b, wr, wc)
    assert (len(h.graph), h.graph.number_of_edges()) == (n, m)


def test_grid_ids_are_row_major():
    h = build_grid(3, 4)
    assert h.node(2, 3) == 7
    assert h.coord(7) == (2, 3)
    with pytest.raises(UnknownNodeError):
        h.node(4, 1)


def test_grid_rejects_empty():
    with pytest.raises(PreconditionError):
        build_grid(0, 3)


def test_implicit_grid_materialises_on_touch():
    h = ImplicitGridHost(1000, 1000)
    v = h.touch(500, 500)
    assert v == 1
    assert len(h.neighbors(v)) == 4
    assert h.materialized == 5
    assert h.touch(500, 500) == 1
    with pytest.raises(PreconditionError):
        h.touch(0, 1)


def test_triangular_small_sides():
    t1 = build_triangular(1)
    assert (len(t1.graph), t1.graph.number_of_edges()) == (3, 3)
    t2 = build_triangular(2)
    assert (len(t2.graph), t2.graph.number_of_edges()) == (6, 9)
    assert triangles(t2.graph) == 4
    assert t2.graph.degree(t2.node(0, 0)) == 2


def test_triangular_every_edge_on_a_triangle():
    t = build_triangular(6)
    g = t.graph
    for u, v in g.edges:
        assert set(g.neighbors(u)) & set(g.neighbors(v))


def test_triangular_adjacency_rule():
    assert triangular_adjacent((1, 0), (0, 1))
    assert not triangular_adjacent((0, 0), (1, 1))
    assert triangular_adjacent((2, 3), (2, 4))


def test_triangular_is_three_colorable_uniquely():
    t = build_triangular(4)
    g = nx.Graph(list(t.graph.edges))
    # x - y mod 3 is a proper coloring for the anti-diagonal rule
    col = {t.node(x, y): (x - y) % 3 for (x, y) in t.id_of}
    assert all(col[u] != col[v] for u, v in g.edges)


def test_k_tree_small():
    t = build_k_tree(2, 3)
    assert t.graph.edges == ((1, 2), (1, 3), (2, 3))
    t4 = build_k_tree(2, 4)
    assert len(t4.graph) == 4 and t4.graph.number_of_edges() == 5


def test_k_tree_attachment_is_a_clique():
    t = build_k_tree(3, 10, "random", 7)
    assert t.graph.number_of_edges() == 6 + 3 * 6
    for v, target in t.attachment.items():
        assert len(target) == 3
        for a, b in combinations(target, 2):
            assert t.graph.has_edge(a, b)
        assert all(t.graph.has_edge(v, u) for u in target)


def test_k_tree_is_chordal_with_expected_clique_number():
    t = build_k_tree(3, 40, "random", 11)
    g = nx.Graph(list(t.graph.edges))
    assert nx.is_chordal(g)
    assert max(len(c) for c in nx.find_cliques(g)) == 4


def test_k_tree_rejects_bad_input():
    with pytest.raises(PreconditionError):
        build_k_tree(2, 2)
    with pytest.raises(PreconditionError):
        build_k_tree(2, 5, "spiral")


def test_gadget_chain_counts():
    g1 = build_gadget_chain(3, 1)
    assert (len(g1.graph), g1.graph.number_of_edges()) == (9, 18)
    g2 = build_gadget_chain(3, 2)
    assert (len(g2.graph), g2.graph.number_of_edges()) == (18, 72)


def test_gadget_chain_k2_is_matchings():
    h = build_gadget_chain(2, 3)
    assert len(h.graph) == 12
    for v in h.graph.nodes:
        ell = h.coord(v)[0]
        same = [w for w in h.graph.neighbors(v) if h.coord(w)[0] == ell]
        assert len(same) == 1
    assert h.node(2, 1, 1) == 5


def test_layered_counts_and_coloring():
    h = build_layered(2, 6)
    assert len(h.graph) == 36
    h3 = build_layered(3, 4)
    assert len(h3.graph) == 32
    col = {}
    for v in h3.graph.nodes:
        i, j = h3.base.coord(h3.root[v])
        col[v] = (i + j) % 2 if h3.layer[v] == 2 else 2
    assert all(col[u] != col[v] for u, v in h3.graph.edges)


def test_layered_duplicate_edges():
    h = build_layered(3, 4)
    assert h.duplicate(1) == 17
    d = h.duplicate(6)
    assert set(h.graph.neighbors(d)) == set(h.base.graph.neighbors(6)) | {6}
    with pytest.raises(PreconditionError):
        h.duplicate(1, level=2)
    t = h.truncate(2)
    assert t.graph == h.base.graph


def test_row_walk_examples():
    h = build_grid(3, 5)
    assert row_walk(h, 2, 1, 5).nodes == (6, 7, 8, 9, 10)
    torus = build_grid(3, 5, True, True)
    w = row_walk(torus, 2, 1, 5, "fwd", True)
    assert w.kind == "cycle" and w.length == 5
    assert row_walk(torus, 2, 4, 2).nodes == (9, 10, 6, 7)
    with pytest.raises(PreconditionError):
        row_walk(h, 1, 1, 5, full_cycle=True)
    with pytest.raises(PreconditionError):
        row_walk(h, 1, 4, 2)


def test_column_walk():
    h = build_grid(4, 4)
    assert column_walk(h, 2, 3, 1).nodes == (10, 6, 2)


def test_grid_matches_networkx():
    h = build_grid(4, 6, True, False)
    ref = nx.grid_2d_graph(4, 6, periodic=(True, False))
    assert h.graph.number_of_edges() == ref.number_of_edges()
    mine = LabeledGraph(h.graph.nodes, h.graph.edges)
    relabel = {(i, j): (i * 6 + j + 1) for i, j in ref.nodes}
    assert set(mine.edges) == {tuple(sorted((relabel[a], relabel[b]))) for a, b in ref.edges}
