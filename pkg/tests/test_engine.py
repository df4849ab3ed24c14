import json

import pytest

from colorlab.adversaries import baseline
from colorlab.analysis import Certificate
from colorlab.engine import (ALGORITHM_LOSES, ALGORITHM_WINS, INCONCLUSIVE, AlgorithmInterface,
                             Commitment, GameOver, GameSession, audit_transcript,
                             audit_transcript_full, first_monochromatic_edge, make_algorithm,
                             registered_algorithms, run_game_concrete, run_game_lazy, verdict)
from colorlab.errors import PreconditionError
from colorlab.graph_core import LabeledGraph
from colorlab.topologies import build_grid, grid_walk
from colorlab.unify_color import ceil_log2


class Script(AlgorithmInterface):
    name = "script"

    def __init__(self, colors, palette=3):
        self.colors = colors
        self.palette = palette

    def step(self, i, v, view, seq):
        return self.colors[v]


class OneStep:
    """Lazy adversary that serves a fixed view list and commits a given host."""

    def __init__(self, views, host, embedding=None, cert=None):
        self.views, self.host, self.embedding, self.cert = views, host, embedding, cert

    def play(self, session):
        for v, view in self.views:
            session.reveal_view(v, view)
        return Commitment(self.host, self.embedding, self.cert)


def test_registry():
    assert {"greedy_first_fit", "fixed_pattern", "stubborn", "unify-color"} <= set(registered_algorithms())
    with pytest.raises(PreconditionError):
        make_algorithm("nope")


def test_single_edge_greedy_wins():
    g = LabeledGraph([1, 2], [(1, 2)])
    r = run_game_concrete(g, [1, 2], baseline("greedy_first_fit"), 1)
    assert r.verdict == ALGORITHM_WINS and r.reason["kind"] == "proper_coloring"
    assert r.transcript.coloring == {1: 1, 2: 2}


def test_triangle_stubborn_loses():
    g = LabeledGraph([1, 2, 3], [(1, 2), (2, 3), (1, 3)])
    r = run_game_concrete(g, [1, 2, 3], baseline("stubborn"), 1)
    assert r.verdict == ALGORITHM_LOSES and r.reason["kind"] == "monochromatic_edge"
    assert r.reason["edge"] == [1, 2]


def test_grid_unify_color_row_major():
    h = build_grid(4, 4)
    T = 3 * ceil_log2(16)
    alg = make_algorithm("unify-color", k=2, n=16, oracle_family="bipartite")
    r = run_game_concrete(h, list(range(1, 17)), alg, T + 0)
    assert r.verdict == ALGORITHM_WINS
    assert audit_transcript(r.transcript, h).ok


def test_partial_reveal_is_inconclusive():
    h = build_grid(5, 5)
    r = run_game_concrete(h, [1], baseline("greedy_first_fit"), 1)
    assert r.verdict == INCONCLUSIVE


def test_invalid_output_loses_and_ends_session():
    g = LabeledGraph([1, 2], [(1, 2)])
    s = GameSession(Script({1: 7, 2: 1}), 1, "concrete")
    assert s.reveal(1, [1, 2], [(1, 2)]) is None
    assert s.finished
    with pytest.raises(GameOver):
        s.reveal(2)
    res = verdict(s.transcript, g)
    assert res.verdict == ALGORITHM_LOSES and res.reason["kind"] == "invalid_output"


def test_bool_is_not_a_color():
    s = GameSession(Script({1: True}), 0, "concrete")
    s.reveal(1, [1])
    assert s.finished


def test_session_rejects_repeat_and_out_of_range_ids():
    s = GameSession(baseline("greedy_first_fit"), 0, "concrete", id_bound=4)
    s.reveal(1, [1])
    with pytest.raises(PreconditionError):
        s.reveal(1)
    with pytest.raises(PreconditionError):
        s.reveal(5, [5])


def test_contradictory_view_fails_audit():
    path = LabeledGraph([1, 2, 3], [(1, 2), (2, 3)])
    lying = LabeledGraph([1, 2, 3], [(1, 2), (2, 3), (1, 3)])
    adv = OneStep([(2, lying)], path)
    r = run_game_lazy(adv, baseline("greedy_first_fit"), 1)
    assert r.verdict == ALGORITHM_WINS and r.reason["kind"] == "audit_violation"
    assert r.audit.step == 1


def test_shrinking_view_fails_audit():
    h = build_grid(1, 5)
    v1 = LabeledGraph([1, 2], [(1, 2)])
    v2 = LabeledGraph([4, 5], [(4, 5)])
    adv = OneStep([(1, v1), (5, v2)], h)
    r = run_game_lazy(adv, baseline("greedy_first_fit"), 1)
    assert not r.audit.ok and r.audit.step == 2


def test_certificate_verdict():
    h = build_grid(3, 3)
    ring = [(1, 1), (1, 2), (1, 3), (2, 3), (3, 3), (3, 2), (3, 1), (2, 1)]
    ids = [h.node(*p) for p in ring]
    colors = dict(zip(ids, [1, 2, 3, 1, 2, 3, 1, 2]))
    seen_nodes, views = set(), []
    for v in ids:
        seen_nodes.add(v)
        g = LabeledGraph(seen_nodes, [e for e in h.graph.edges if set(e) <= seen_nodes])
        views.append((v, g))
    walk = grid_walk(h, ring, "cycle")
    from colorlab.analysis import cycle_zero_certificate
    cert = cycle_zero_certificate(h, colors, walk)
    r = run_game_lazy(OneStep(views, h, None, cert), Script(colors), 0)
    assert r.verdict == ALGORITHM_LOSES and r.reason["kind"] == "certificate"
    bogus = Certificate("grid_cycle", {"walk": list(walk.nodes), "b": 5})
    with pytest.raises(PreconditionError):
        run_game_lazy(OneStep(views, h, None, bogus), Script(colors), 0)


def test_audits_agree_on_honest_and_tampered_transcripts():
    h = build_grid(6, 6)
    r = run_game_concrete(h, [15, 1, 36, 22, 8], baseline("greedy_first_fit"), 1)
    t = r.transcript
    assert audit_transcript(t, h).ok and audit_transcript_full(t, h).ok
    s = t.steps[2]
    from dataclasses import replace
    t.steps[2] = replace(s, added_edges=s.added_edges[1:])
    assert audit_transcript(t, h).step == 3
    assert audit_transcript_full(t, h).step == 3


def test_transcript_json_and_delta_views():
    h = build_grid(3, 3)
    r = run_game_concrete(h, [1, 9], baseline("greedy_first_fit"), 1)
    full = json.loads(r.transcript.to_json())
    assert full["steps"][1]["view_nodes"] == [1, 2, 4, 6, 8, 9]
    delta = json.loads(r.transcript.to_json(full_views=False))
    assert delta["views"] == "delta"
    assert delta["steps"][1]["view_nodes"] == [6, 8, 9]


def test_replay_is_deterministic():
    h = build_grid(5, 5)
    order = [13, 1, 25, 7, 19, 3]
    runs = [run_game_concrete(h, order, make_algorithm("unify-color", k=2, n=25,
                                                       oracle_family="bipartite"), 15)
            for _ in range(2)]
    assert runs[0].transcript.to_json() == runs[1].transcript.to_json()


def test_first_monochromatic_edge():
    h = build_grid(2, 2)
    assert first_monochromatic_edge(h, {1: 1, 2: 2, 3: 2, 4: 1}) is None
    assert first_monochromatic_edge(h, {1: 1, 2: 1}) == (1, 2)


def test_bad_order_rejected():
    h = build_grid(2, 2)
    with pytest.raises(PreconditionError):
        run_game_concrete(h, [1, 1], baseline("stubborn"), 1)
