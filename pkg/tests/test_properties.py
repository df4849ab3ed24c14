import random
from dataclasses import replace

from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from colorlab.adversaries import baseline
from colorlab.analysis import (b_value, b_values_batch, check_parity, enumerate_colorings,
                               simple_cycles)
from colorlab.engine import (ALGORITHM_WINS, audit_transcript, audit_transcript_full,
                             run_game_concrete)
from colorlab.graph_core import DirectedWalk, LabeledGraph, ball, induced_subgraph, is_proper
from colorlab.oracles import OracleConfig, find_coloring, oracle_partition
from colorlab.topologies import build_grid, build_k_tree, build_triangular
from colorlab.unify_color import UnifyColor

from brute import b_direct

FAST = settings(max_examples=40, deadline=None,
                suppress_health_check=[HealthCheck.too_slow])


@st.composite
def graphs(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return LabeledGraph(range(1, n + 1), edges)


@st.composite
def colored_grid_path(draw):
    """A random proper 3-coloring of a small grid and a random simple path in it."""
    a, b = draw(st.integers(1, 4)), draw(st.integers(2, 5))
    g = build_grid(a, b).graph
    rng = random.Random(draw(st.integers(0, 2 ** 16)))
    col = find_coloring(g, 3, rng.sample([1, 2, 3], 3))
    start = rng.choice(sorted(g.nodes))
    path = [start]
    for _ in range(draw(st.integers(0, a * b))):
        nxt = [w for w in g.neighbors(path[-1]) if w not in path]
        if not nxt:
            break
        path.append(rng.choice(sorted(nxt)))
    return col, DirectedWalk(tuple(path))


@given(graphs())
def test_json_round_trip(g):
    assert LabeledGraph.from_json(g.to_json()) == g


@given(graphs(), st.integers(0, 3), st.integers(0, 3))
def test_ball_is_monotone_in_radius(g, r1, r2):
    lo, hi = sorted((r1, r2))
    assert ball(g, {1}, lo) <= ball(g, {1}, hi)


@given(graphs(), st.data())
def test_induced_subgraph_keeps_exactly_internal_edges(g, data):
    keep = data.draw(st.sets(st.sampled_from(sorted(g.nodes))))
    h = induced_subgraph(g, keep)
    assert set(h.edges) == {e for e in g.edges if set(e) <= keep}


@given(st.lists(st.sampled_from([1, 2, 3]), min_size=1, max_size=12))
def test_b_value_matches_definition_and_reverses(colors):
    ids = tuple(range(1, len(colors) + 1))
    col = dict(zip(ids, colors))
    w = DirectedWalk(ids)
    assert b_value(col, w) == b_direct(colors, False)
    assert b_value(col, w.reversed()) == -b_value(col, w)


@FAST
@given(colored_grid_path())
def test_parity_on_random_grid_colorings(case):
    col, w = case
    assert check_parity(col, w).ok


@FAST
@given(st.integers(2, 4), st.integers(2, 4), st.integers(0, 50))
def test_grid_cycles_are_balanced(a, b, pick):
    g = build_grid(a, b).graph
    cols = list(enumerate_colorings(g, 3, limit=pick + 1))
    col = cols[-1]
    for c in simple_cycles(g):
        assert b_value(col, c) == 0


@FAST
@given(st.integers(2, 7), st.integers(0, 2 ** 16), st.permutations([1, 2, 3]))
def test_triangular_oracle_ignores_color_order(d, seed, order):
    t = build_triangular(d)
    rng = random.Random(seed)
    center = rng.choice(sorted(t.graph.nodes))
    c = ball(t.graph, {center}, rng.randint(0, 2))
    cfg = OracleConfig("triangular", 3, 1)
    assert oracle_partition(cfg, t.graph, c) == oracle_partition(cfg, t.graph, c, color_order=order)


@FAST
@given(st.integers(0, 2 ** 16))
def test_unify_color_proper_on_random_orders(seed):
    rng = random.Random(seed)
    host = [build_grid(rng.randint(2, 9), rng.randint(2, 9)),
            build_triangular(rng.randint(2, 8)),
            build_k_tree(2, rng.randint(3, 50), "random", seed)][seed % 3]
    k, fam = [(2, "bipartite"), (3, "triangular"), (3, "ktree")][seed % 3]
    order = sorted(host.graph.nodes)
    rng.shuffle(order)
    alg = UnifyColor(k, len(order), oracle_family=fam, check_invariants=True)
    r = run_game_concrete(host, order, alg, alg.T_total)
    assert r.verdict == ALGORITHM_WINS
    assert not alg.invariant_violations
    assert all(post >= 2 * pre for pre, post in alg.merge_log)


@FAST
@given(st.integers(0, 2 ** 16))
def test_replay_is_deterministic(seed):
    rng = random.Random(seed)
    host = build_grid(6, 6)
    order = rng.sample(sorted(host.graph.nodes), 12)
    a, b = (run_game_concrete(host, order, UnifyColor(2, 36, oracle_family="bipartite"), 5)
            for _ in range(2))
    assert a.transcript.to_json() == b.transcript.to_json()


@FAST
@given(st.integers(0, 2 ** 16), st.integers(1, 3))
def test_audit_catches_a_dropped_edge_at_its_step(seed, T):
    rng = random.Random(seed)
    host = build_grid(7, 7)
    order = rng.sample(sorted(host.graph.nodes), 10)
    t = run_game_concrete(host, order, baseline("greedy_first_fit"), T).transcript
    assert audit_transcript(t, host).ok and audit_transcript_full(t, host).ok
    steps = [s for s in t.steps if s.added_edges]
    assume(steps)
    s = rng.choice(steps)
    t.steps[s.i - 1] = replace(s, added_edges=s.added_edges[:-1])
    assert audit_transcript(t, host).step == s.i
    assert audit_transcript_full(t, host).step == s.i


@FAST
@given(graphs(max_n=7), st.integers(2, 4))
def test_find_coloring_agrees_with_enumeration(g, k):
    col = find_coloring(g, k)
    exists = next(iter(enumerate_colorings(g, k)), None) is not None
    assert (col is not None) == exists
    if col is not None:
        assert is_proper(g, col)


@FAST
@given(st.integers(2, 4), st.integers(2, 5), st.integers(0, 30))
def test_batch_b_values_match_scalar(a, b, pick):
    g = build_grid(a, b).graph
    nodes = sorted(g.nodes)
    index = {v: t for t, v in enumerate(nodes)}
    col = list(enumerate_colorings(g, 3, limit=pick + 1))[-1]
    walks = list(simple_cycles(g))[:30] + [DirectedWalk(tuple(nodes[:b]))]
    arr = [[col[v] for v in nodes]]
    got = b_values_batch(arr, walks, index)[0]
    assert list(got) == [b_value(col, w) for w in walks]
