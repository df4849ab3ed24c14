"""Online-LOCAL game runtime.

A game reveals nodes one at a time.  After each reveal the algorithm sees the
subgraph induced by the union of radius-``T`` balls around every node revealed
so far, and must answer with a color for the newest node.

Concrete games compute those views from a host graph.  Lazy games let an
adversary serve views itself and commit to a host plus an id embedding at the
end; :func:`audit_transcript` then re-derives every view from the commitment.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .analysis import Certificate, validate_certificate
from .errors import OracleFailure, PreconditionError
from .graph_core import (Edge, LabeledGraph, bfs_distances, canonical_edge,
                         induced_subgraph, views_equal)

ALGORITHM_WINS = "AlgorithmWins"
ALGORITHM_LOSES = "AlgorithmLoses"
INCONCLUSIVE = "inconclusive"


class AlgorithmInterface:
    """Deterministic online coloring algorithm with private memory.

    ``step`` receives the step index, the revealed node, the current discovered
    view and the reveal sequence so far; it returns a color in ``1..palette``.
    The view object is shared and grows between calls: treat it as read-only.
    """

    name = "algorithm"
    palette = 3

    def step(self, i: int, v: int, view, seq: Sequence[int]) -> int:
        raise NotImplementedError


_REGISTRY: dict[str, Callable[..., AlgorithmInterface]] = {}


def register_algorithm(name: str):
    def deco(factory):
        _REGISTRY[name] = factory
        return factory
    return deco


def make_algorithm(name: str, **params) -> AlgorithmInterface:
    # importing these modules fills the registry
    from . import adversaries, unify_color  # noqa: F401
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise PreconditionError(
            f"unknown algorithm {name!r}; known: {sorted(_REGISTRY)}") from None
    return factory(**params)


def registered_algorithms() -> list[str]:
    from . import adversaries, unify_color  # noqa: F401
    return sorted(_REGISTRY)


class DiscoveredView:
    """The growing induced view handed to algorithms."""

    def __init__(self):
        self._adj: dict[int, set[int]] = {}
        self._m = 0

    def neighbors(self, v: int) -> set[int]:
        return self._adj[v]

    def __contains__(self, v) -> bool:
        return v in self._adj

    def __len__(self) -> int:
        return len(self._adj)

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self._adj))

    @property
    def nodes(self) -> frozenset[int]:
        return frozenset(self._adj)

    @property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(sorted((u, v) for u, ns in self._adj.items() for v in ns if u < v))

    def number_of_edges(self) -> int:
        return self._m

    def snapshot(self) -> LabeledGraph:
        return LabeledGraph._from_adjacency({v: frozenset(ns) for v, ns in self._adj.items()})

    def _grow(self, nodes: Iterable[int], edges: Iterable[Edge]) -> None:
        for v in nodes:
            self._adj.setdefault(v, set())
        for u, v in edges:
            if v not in self._adj[u]:
                self._adj[u].add(v)
                self._adj[v].add(u)
                self._m += 1


@dataclass(frozen=True)
class Step:
    i: int
    node: int
    added_nodes: tuple[int, ...]
    added_edges: tuple[Edge, ...]
    color: int | None
    monotone: bool = True


@dataclass
class Transcript:
    T: int
    mode: str
    steps: list[Step] = field(default_factory=list)
    coloring: dict[int, int] = field(default_factory=dict)
    invalid: tuple[int, object] | None = None
    verdict: dict | None = None

    def views(self) -> Iterator[LabeledGraph]:
        """Served view after each step, rebuilt from the per-step additions."""
        adj: dict[int, set[int]] = {}
        for s in self.steps:
            if not s.monotone:
                adj = {}
            for v in s.added_nodes:
                adj.setdefault(v, set())
            for u, v in s.added_edges:
                adj[u].add(v)
                adj[v].add(u)
            yield LabeledGraph._from_adjacency({v: frozenset(ns) for v, ns in adj.items()})

    def served_view(self, i: int) -> LabeledGraph:
        for s, g in zip(self.steps, self.views()):
            if s.i == i:
                return g
        raise PreconditionError(f"no step {i}")

    @property
    def order(self) -> list[int]:
        return [s.node for s in self.steps]

    def to_dict(self, full_views: bool = True) -> dict:
        steps = []
        if full_views:
            for s, g in zip(self.steps, self.views()):
                steps.append({"i": s.i, "node": s.node, "view_nodes": sorted(g.nodes),
                              "view_edges": [list(e) for e in g.edges], "color": s.color})
        else:
            for s in self.steps:
                steps.append({"i": s.i, "node": s.node, "view_nodes": list(s.added_nodes),
                              "view_edges": [list(e) for e in s.added_edges], "color": s.color})
        out = {"T": self.T, "mode": self.mode, "steps": steps, "verdict": self.verdict}
        if not full_views:
            out["views"] = "delta"
        return out

    def to_json(self, full_views: bool = True) -> str:
        return json.dumps(self.to_dict(full_views), separators=(",", ":"))


class GameOver(Exception):
    pass


class GameSession:
    """Serves views to one algorithm and records everything it answers."""

    def __init__(self, alg: AlgorithmInterface, T: int, mode: str = "lazy",
                 id_bound: int | None = None):
        if T < 0:
            raise PreconditionError("locality must be nonnegative")
        self.alg = alg
        self.T = T
        self.palette = alg.palette
        self.view = DiscoveredView()
        self.transcript = Transcript(T, mode)
        self.sequence: list[int] = []
        self.id_bound = id_bound
        self.conflict: Edge | None = None

    @property
    def coloring(self) -> dict[int, int]:
        return self.transcript.coloring

    @property
    def finished(self) -> bool:
        return self.transcript.invalid is not None

    def reveal(self, v: int, added_nodes: Iterable[int] = (),
               added_edges: Iterable[Edge] = ()) -> int | None:
        """Grow the view by the given additions, then ask for ``v``'s color."""
        if self.finished:
            raise GameOver("the algorithm already produced an invalid output")
        if v in self.coloring:
            raise PreconditionError(f"node {v} was already revealed")
        added_nodes = tuple(sorted(x for x in set(added_nodes) if x not in self.view))
        if self.id_bound is not None:
            for x in added_nodes:
                if not 1 <= x <= self.id_bound:
                    raise PreconditionError(f"id {x} outside 1..{self.id_bound}")
        self.view._grow(added_nodes, ())
        edges = set()
        for a, b in added_edges:
            e = canonical_edge(a, b)
            if e[1] not in self.view.neighbors(e[0]):
                edges.add(e)
        added_edges = tuple(sorted(edges))
        self.view._grow((), added_edges)
        if v not in self.view:
            raise PreconditionError(f"revealed node {v} is not in the served view")
        return self._ask(v, added_nodes, added_edges, True)

    def reveal_view(self, v: int, view: LabeledGraph) -> int | None:
        """Serve a full view; a view that drops anything is recorded as non-monotone."""
        old = self.view.snapshot()
        monotone = old.nodes <= view.nodes and set(old.edges) <= set(view.edges)
        if monotone:
            return self.reveal(v, view.nodes - old.nodes, set(view.edges) - set(old.edges))
        self.view = DiscoveredView()
        self.view._grow(view.nodes, view.edges)
        return self._ask(v, tuple(sorted(view.nodes)), view.edges, False)

    def _ask(self, v, added_nodes, added_edges, monotone) -> int | None:
        i = len(self.transcript.steps) + 1
        self.sequence.append(v)
        try:
            color = self.alg.step(i, v, self.view, tuple(self.sequence))
        except OracleFailure as exc:
            # an algorithm that cannot answer forfeits like any invalid output
            color = f"oracle failure: {exc}"
        valid = isinstance(color, int) and not isinstance(color, bool) and 1 <= color <= self.palette
        self.transcript.steps.append(Step(i, v, added_nodes, added_edges,
                                          color if valid else None, monotone))
        if not valid:
            self.transcript.invalid = (v, color)
            return None
        self.coloring[v] = color
        if self.conflict is None:
            for w in sorted(self.view.neighbors(v)):
                if self.coloring.get(w) == color:
                    self.conflict = canonical_edge(v, w)
                    break
        return color


@dataclass(frozen=True)
class AuditResult:
    ok: bool
    step: int | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {"ok": self.ok, "step": self.step, "detail": self.detail}


def host_ball_delta(host, center, T: int, seen: set) -> tuple[set, set]:
    """Nodes of ``ball(center, T)`` not yet in ``seen`` plus their edges into ``seen``; updates ``seen``."""
    ball = bfs_distances(host, [center], T)
    new = [x for x in ball if x not in seen]
    seen.update(new)
    edges = set()
    for x in new:
        for y in host.neighbors(x):
            if y in seen:
                edges.add(canonical_edge(x, y))
    return set(new), edges


def audit_transcript(t: Transcript, host, embedding: Mapping[int, int] | None = None) -> AuditResult:
    """Re-derive every served view from ``host`` and compare.

    Each served view equals the previous one plus the step's additions, so
    comparing additions step by step is the same as comparing whole views.
    ``embedding`` maps served ids to host nodes (identity when omitted).
    """
    emb = embedding if embedding is not None else _Identity()
    used: dict[int, int] = {}
    seen: set = set()
    for s in t.steps:
        if not s.monotone:
            return AuditResult(False, s.i, "served view dropped nodes or edges")
        for x in s.added_nodes:
            if x not in emb:
                return AuditResult(False, s.i, f"served node {x} has no host image")
            h = emb[x]
            if used.setdefault(h, x) != x:
                return AuditResult(False, s.i, f"embedding is not injective at {h}")
        if s.node not in emb:
            return AuditResult(False, s.i, f"revealed node {s.node} has no host image")
        center = emb[s.node]
        if center not in host:
            return AuditResult(False, s.i, f"host has no node {center}")
        new, edges = host_ball_delta(host, center, t.T, seen)
        served_nodes = {emb[x] for x in s.added_nodes}
        if served_nodes != new:
            return AuditResult(False, s.i, "node set differs from the host ball union")
        served_edges = {canonical_edge(emb[a], emb[b]) for a, b in s.added_edges}
        if served_edges != edges:
            return AuditResult(False, s.i, "edge set differs from the host ball union")
    return AuditResult(True)


def audit_transcript_full(t: Transcript, host, embedding: Mapping[int, int] | None = None,
                          host_graph: LabeledGraph | None = None) -> AuditResult:
    """Slow reference audit: rebuild each view from scratch and compare whole graphs."""
    emb = embedding if embedding is not None else _Identity()
    g = host_graph if host_graph is not None else getattr(host, "graph", host)
    union: set = set()
    for s, served in zip(t.steps, t.views()):
        if any(x not in emb for x in served.nodes):
            return AuditResult(False, s.i, "served node without host image")
        union |= set(bfs_distances(g, [emb[s.node]], t.T))
        expected = induced_subgraph(g, union)
        image = LabeledGraph([emb[x] for x in served.nodes],
                             [(emb[a], emb[b]) for a, b in served.edges])
        if not views_equal(expected, image):
            return AuditResult(False, s.i, "view mismatch")
    return AuditResult(True)


class _Identity(dict):
    def __contains__(self, x) -> bool:
        return True

    def __getitem__(self, x):
        return x


@dataclass
class GameResult:
    verdict: str
    reason: dict | None
    audit: AuditResult
    transcript: Transcript
    certificate: Certificate | None = None
    host: object = None
    embedding: Mapping[int, int] | None = None
    metrics: dict = field(default_factory=dict)

    @property
    def algorithm_loses(self) -> bool:
        return self.verdict == ALGORITHM_LOSES

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "reason": self.reason, "audit": self.audit.to_dict(),
                "certificate": self.certificate.to_dict() if self.certificate else None,
                "metrics": self.metrics}


def host_coloring(col: Mapping[int, int], embedding: Mapping[int, int] | None) -> dict:
    if embedding is None:
        return dict(col)
    return {embedding[v]: c for v, c in col.items()}


def first_monochromatic_edge(host, col: Mapping[int, int]) -> Edge | None:
    for u in sorted(col):
        for w in sorted(host.neighbors(u)):
            if w > u and col.get(w) == col[u]:
                return (u, w)
    return None


def verdict(t: Transcript, host, col: Mapping[int, int] | None = None,
            embedding: Mapping[int, int] | None = None,
            certificate: Certificate | None = None,
            audit: AuditResult | None = None) -> GameResult:
    """Judge a finished (or early-stopped) game against its committed host."""
    col = t.coloring if col is None else col
    audit = audit if audit is not None else AuditResult(True)

    def done(v, reason, cert=None):
        t.verdict = {"result": v, "reason": reason}
        return GameResult(v, reason, audit, t, cert, host, embedding)

    if not audit.ok:
        return done(ALGORITHM_WINS, {"kind": "audit_violation", "step": audit.step,
                                     "detail": audit.detail})
    if t.invalid is not None:
        node, value = t.invalid
        return done(ALGORITHM_LOSES, {"kind": "invalid_output", "node": node, "value": repr(value)})
    hcol = host_coloring(col, embedding)
    edge = first_monochromatic_edge(host, hcol)
    if edge is not None:
        return done(ALGORITHM_LOSES, {"kind": "monochromatic_edge", "edge": list(edge)})
    if certificate is not None:
        if not validate_certificate(certificate, host, hcol):
            raise PreconditionError(f"certificate of kind {certificate.kind} does not validate")
        return done(ALGORITHM_LOSES, {"kind": "certificate", "certificate": certificate.kind},
                    certificate)
    try:
        total = len(host)
    except (TypeError, OverflowError):
        total = None
    if total is not None and len(hcol) == total:
        return done(ALGORITHM_WINS, {"kind": "proper_coloring"})
    return done(INCONCLUSIVE, {"kind": "partial_reveal", "revealed": len(hcol)})


def run_game_concrete(host, order: Sequence[int], alg: AlgorithmInterface, T_total: int,
                      stop_on_conflict: bool = False, id_bound: int | None = None) -> GameResult:
    """Reveal ``order`` on ``host`` with locality ``T_total`` and judge the result."""
    order = list(order)
    if len(set(order)) != len(order) or any(v not in host for v in order):
        raise PreconditionError("reveal order must list distinct host nodes")
    if id_bound is None:
        id_bound = len(host) ** 2
    session = GameSession(alg, T_total, "concrete", id_bound=max(id_bound, max(order, default=1)))
    seen: set = set()
    total = len(host)
    for v in order:
        if len(seen) == total:
            new, edges = set(), set()
        else:
            new, edges = host_ball_delta(host, v, T_total, seen)
        session.reveal(v, new, edges)
        if session.finished or (stop_on_conflict and session.conflict is not None):
            break
    result = verdict(session.transcript, host)
    result.metrics = {"reveals": len(session.transcript.steps)}
    return result


class Commitment:
    """What a lazy adversary hands back: host, served-id embedding, optional certificate."""

    def __init__(self, host, embedding: Mapping[int, int] | None,
                 certificate: Certificate | None = None, metrics: dict | None = None):
        self.host = host
        self.embedding = embedding
        self.certificate = certificate
        self.metrics = metrics or {}


def run_game_lazy(adv, alg: AlgorithmInterface, T_total: int,
                  id_bound: int | None = None) -> GameResult:
    """Let ``adv.play(session)`` drive the game, then audit its commitment and judge."""
    session = GameSession(alg, T_total, "lazy", id_bound=id_bound)
    commitment = adv.play(session)
    t = session.transcript
    audit = audit_transcript(t, commitment.host, commitment.embedding)
    result = verdict(t, commitment.host, t.coloring, commitment.embedding,
                     commitment.certificate if audit.ok else None, audit)
    result.metrics = dict(commitment.metrics, reveals=len(t.steps))
    return result
