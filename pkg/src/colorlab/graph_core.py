"""Labeled undirected graphs and the handful of operations every other module needs.

Graphs are immutable once built.  Anything exposing ``neighbors(v)`` and
``__contains__`` (hosts, the engine's growing view) can be passed to
:func:`ball`, :func:`bfs_distances` and :func:`is_proper`.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import PreconditionError, UnknownNodeError

Edge = tuple[int, int]


def canonical_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class LabeledGraph:
    """Simple undirected graph over positive integer ids."""

    __slots__ = ("_adj", "_edges", "_hash")

    def __init__(self, nodes: Iterable[int] = (), edges: Iterable[Iterable[int]] = ()):
        adj: dict[int, set[int]] = {}
        for v in nodes:
            _check_id(v)
            adj.setdefault(v, set())
        for e in edges:
            u, v = e
            if u == v:
                raise PreconditionError(f"self-loop at {u}")
            if u not in adj or v not in adj:
                raise UnknownNodeError(f"edge ({u}, {v}) has an endpoint outside the node set")
            adj[u].add(v)
            adj[v].add(u)
        self._adj = {v: frozenset(ns) for v, ns in adj.items()}
        self._edges: tuple[Edge, ...] | None = None
        self._hash: int | None = None

    @classmethod
    def _from_adjacency(cls, adj: Mapping[int, frozenset[int]]) -> "LabeledGraph":
        g = cls.__new__(cls)
        g._adj = dict(adj)
        g._edges = None
        g._hash = None
        return g

    @property
    def nodes(self) -> frozenset[int]:
        return frozenset(self._adj)

    @property
    def edges(self) -> tuple[Edge, ...]:
        if self._edges is None:
            self._edges = tuple(sorted(
                (u, v) for u, ns in self._adj.items() for v in ns if u < v))
        return self._edges

    def neighbors(self, v: int) -> frozenset[int]:
        try:
            return self._adj[v]
        except KeyError:
            raise UnknownNodeError(v) from None

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj.get(u, ())

    def number_of_edges(self) -> int:
        return sum(len(ns) for ns in self._adj.values()) // 2

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self._adj))

    def __len__(self) -> int:
        return len(self._adj)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return self._adj == other._adj

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nodes, self.edges))
        return self._hash

    def __repr__(self) -> str:
        return f"LabeledGraph(n={len(self)}, m={self.number_of_edges()})"

    def to_dict(self) -> dict:
        return {"nodes": sorted(self._adj), "edges": [list(e) for e in self.edges]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: Mapping) -> "LabeledGraph":
        return cls(d["nodes"], (tuple(e) for e in d["edges"]))

    @classmethod
    def from_json(cls, text: str) -> "LabeledGraph":
        return cls.from_dict(json.loads(text))


def _check_id(v) -> None:
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise PreconditionError(f"node ids must be positive integers, got {v!r}")


@dataclass(frozen=True)
class DirectedWalk:
    """An ordered node sequence; ``kind == "cycle"`` adds the closing edge."""

    nodes: tuple[int, ...]
    kind: str = "path"

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if self.kind not in ("path", "cycle"):
            raise PreconditionError(f"unknown walk kind {self.kind!r}")
        if not self.nodes:
            raise PreconditionError("a walk needs at least one node")
        if self.kind == "cycle" and len(self.nodes) < 3:
            raise PreconditionError("a cycle needs at least three nodes")

    @property
    def length(self) -> int:
        n = len(self.nodes)
        return n if self.kind == "cycle" else n - 1

    def directed_edges(self) -> Iterator[Edge]:
        seq = self.nodes
        for i in range(len(seq) - 1):
            yield seq[i], seq[i + 1]
        if self.kind == "cycle":
            yield seq[-1], seq[0]

    def reversed(self) -> "DirectedWalk":
        return DirectedWalk(self.nodes[::-1], self.kind)

    def is_simple(self) -> bool:
        return len(set(self.nodes)) == len(self.nodes)

    def validate(self, g) -> None:
        for u, v in self.directed_edges():
            if u not in g or v not in g:
                raise UnknownNodeError(f"walk node outside graph: ({u}, {v})")
            if v not in g.neighbors(u):
                raise PreconditionError(f"walk step ({u}, {v}) is not an edge")


def _require_nodes(g, s: Iterable[int]) -> list[int]:
    out = list(s)
    for v in out:
        if v not in g:
            raise UnknownNodeError(v)
    return out


def induced_subgraph(g: LabeledGraph, s: Iterable[int]) -> LabeledGraph:
    keep = set(_require_nodes(g, s))
    return LabeledGraph._from_adjacency(
        {v: frozenset(w for w in g.neighbors(v) if w in keep) for v in keep})


def bfs_distances(g, sources: Iterable[int], r: int) -> dict[int, int]:
    """Hop distance from the source set, for every node within distance ``r``."""
    if r < 0:
        raise PreconditionError("radius must be nonnegative")
    dist = {v: 0 for v in _require_nodes(g, sources)}
    frontier = deque(dist)
    while frontier:
        v = frontier.popleft()
        d = dist[v]
        if d == r:
            continue
        for w in g.neighbors(v):
            if w not in dist:
                dist[w] = d + 1
                frontier.append(w)
    return dist


def ball(g, s: Iterable[int], r: int) -> set[int]:
    return set(bfs_distances(g, s, r))


def is_connected_set(g, s: Iterable[int]) -> bool:
    s = set(s)
    if not s:
        return True
    start = min(s)
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in g.neighbors(v):
            if w in s and w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(s)


@dataclass(frozen=True)
class ProperCheck:
    edge: Edge | None = None

    @property
    def ok(self) -> bool:
        return self.edge is None

    def __bool__(self) -> bool:
        return self.ok


def is_proper(g, col: Mapping[int, int]) -> ProperCheck:
    """First monochromatic edge in canonical order, or ok.  Uncolored endpoints never clash."""
    edges = g.edges if isinstance(g, LabeledGraph) else _edges_among(g, col)
    for u, v in edges:
        cu = col.get(u)
        if cu is not None and cu == col.get(v):
            return ProperCheck((u, v))
    return ProperCheck()


def _edges_among(g, col: Mapping[int, int]) -> list[Edge]:
    out = set()
    for u in col:
        if u not in g:
            continue
        for v in g.neighbors(u):
            if v in col:
                out.add(canonical_edge(u, v))
    return sorted(out)


def views_equal(v1: LabeledGraph, v2: LabeledGraph) -> bool:
    return v1.nodes == v2.nodes and set(v1.edges) == set(v2.edges)
