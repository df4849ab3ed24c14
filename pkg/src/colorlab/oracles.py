"""Partition oracle: recover the unique k-partition of a connected seen set
from any proper k-coloring of its radius-ell neighbourhood."""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .analysis import PartitionWitness
from .errors import OracleFailure, PreconditionError, UnknownNodeError
from .graph_core import ball, induced_subgraph, is_connected_set

DEFAULT_NODE_GUARD = 5000

FAMILY_RADIUS = {"bipartite": 0, "triangular": 1, "ktree": 1}
FAMILIES = ("bipartite", "triangular", "ktree", "layered", "generic")


def node_guard() -> int:
    raw = os.environ.get("COLORLAB_NODE_GUARD")
    return int(raw) if raw else DEFAULT_NODE_GUARD


@dataclass(frozen=True)
class OracleConfig:
    family: str
    k: int
    ell: int
    canonical_rule: str = "smallest-uncovered-id"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise PreconditionError(f"unknown oracle family {self.family!r}")
        if self.k < 2:
            raise PreconditionError("k must be at least 2")
        if self.ell < 0:
            raise PreconditionError("radius must be nonnegative")
        if self.family == "bipartite" and self.k != 2:
            raise PreconditionError("the bipartite family has k = 2")
        expected = FAMILY_RADIUS.get(self.family)
        if self.family == "layered":
            expected = self.k
        if expected is not None and self.ell != expected:
            raise PreconditionError(
                f"family {self.family} uses radius {expected}, got {self.ell}")


def find_coloring(g, k: int, color_order: Sequence[int] | None = None) -> dict[int, int] | None:
    """Any proper k-coloring of ``g``, or ``None``.

    Backtracking over the most constrained node (ties: smallest id) with
    forced-move propagation.  Deterministic for a fixed ``color_order``.
    """
    order = list(color_order) if color_order is not None else list(range(1, k + 1))
    if sorted(order) != list(range(1, k + 1)):
        raise PreconditionError("color_order must permute 1..k")
    ids = sorted(g.nodes)
    index = {v: t for t, v in enumerate(ids)}
    nbrs = [[index[w] for w in g.neighbors(v)] for v in ids]
    n = len(ids)
    full = (1 << k) - 1
    domain = [full] * n
    color = [0] * n
    trail: list[tuple[int, int, int]] = []
    uncolored = set(range(n))

    def set_domain(t, d):
        trail.append((t, domain[t], color[t]))
        domain[t] = d

    def assign(t, c) -> bool:
        queue = deque([(t, c)])
        while queue:
            t, c = queue.popleft()
            if color[t]:
                if color[t] != c:
                    return False
                continue
            if not domain[t] >> (c - 1) & 1:
                return False
            trail.append((t, domain[t], color[t]))
            color[t] = c
            domain[t] = 1 << (c - 1)
            uncolored.discard(t)
            bit = 1 << (c - 1)
            for w in nbrs[t]:
                if color[w]:
                    if color[w] == c:
                        return False
                    continue
                d = domain[w]
                if d & bit:
                    d &= ~bit
                    if not d:
                        return False
                    set_domain(w, d)
                    if d & (d - 1) == 0:
                        queue.append((w, d.bit_length()))
        return True

    def undo(mark):
        while len(trail) > mark:
            t, d, c = trail.pop()
            domain[t] = d
            if color[t] and not c:
                uncolored.add(t)
            color[t] = c

    def choose():
        if not uncolored:
            return None
        return min(uncolored, key=lambda t: (domain[t].bit_count(), t))

    stack: list[list] = []
    while True:
        t = choose()
        if t is None:
            return {ids[s]: color[s] for s in range(n)}
        cands = [c for c in order if domain[t] >> (c - 1) & 1]
        stack.append([t, cands, len(trail)])
        while True:
            if not stack:
                return None
            frame = stack[-1]
            undo(frame[2])
            if not frame[1]:
                stack.pop()
                continue
            c = frame[1].pop(0)
            if assign(frame[0], c):
                break


def two_coloring(g) -> dict[int, int] | None:
    """BFS 2-coloring, components seeded at their smallest id with color 1."""
    col: dict[int, int] = {}
    for s in sorted(g.nodes):
        if s in col:
            continue
        col[s] = 1
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in g.neighbors(v):
                if w not in col:
                    col[w] = 3 - col[v]
                    queue.append(w)
                elif col[w] == col[v]:
                    return None
    return col


def canonicalize(p: PartitionWitness | Iterable[Iterable[int]]) -> PartitionWitness:
    """Order parts so part s holds the smallest id not covered by parts 1..s-1."""
    parts = p.parts if isinstance(p, PartitionWitness) else tuple(frozenset(x) for x in p)
    return PartitionWitness(parts)


def oracle_partition(cfg: OracleConfig, view, c: Iterable[int], *,
                     use_fast_path: bool = True,
                     color_order: Sequence[int] | None = None) -> PartitionWitness:
    """Partition of the connected set ``c`` read off a k-coloring of its ``ell``-ball in ``view``."""
    c = set(c)
    if not c:
        raise PreconditionError("empty query set")
    for v in c:
        if v not in view:
            raise UnknownNodeError(v)
    if not is_connected_set(view, c):
        raise PreconditionError("oracle queries need a connected node set")
    region = ball(view, c, cfg.ell) if cfg.ell else c
    guard = node_guard()
    if len(region) > guard:
        raise OracleFailure(f"query region has {len(region)} nodes, guard is {guard}")
    sub = induced_subgraph(view, region)
    if use_fast_path and cfg.k == 2 and color_order is None:
        col = two_coloring(sub)
    else:
        col = find_coloring(sub, cfg.k, color_order)
    if col is None:
        raise OracleFailure(f"no proper {cfg.k}-coloring of the radius-{cfg.ell} neighbourhood")
    return PartitionWitness.from_coloring(col, c)

