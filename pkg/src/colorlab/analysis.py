"""b-value calculus on 3-colored grids, gadget classification, exhaustive
coloring enumeration and the local-inferability checker.

Colorings are plain ``dict[node, color]`` mappings throughout.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import PreconditionError, UnknownNodeError
from .graph_core import (DirectedWalk, LabeledGraph, ball, induced_subgraph,
                         is_connected_set)

THREE = (1, 2, 3)


def a_value(cu: int, cv: int) -> int:
    if cu not in THREE or cv not in THREE:
        raise PreconditionError(f"a-values are defined on colors 1..3, got ({cu}, {cv})")
    if cu == 3 or cv == 3:
        return 0
    return cu - cv


def _walk_colors(col: Mapping[int, int], w: DirectedWalk) -> list[int]:
    out = []
    for v in w.nodes:
        c = col.get(v)
        if c is None:
            raise PreconditionError(f"node {v} on the walk is uncolored")
        out.append(c)
    return out


def b_value(col: Mapping[int, int], w: DirectedWalk) -> int:
    _walk_colors(col, w)
    return sum(a_value(col[u], col[v]) for u, v in w.directed_edges())


def _indicator(c: int) -> int:
    return 1 if c == 3 else 0


@dataclass(frozen=True)
class ParityCheck:
    ok: bool
    b: int
    expected_parity: int


def check_parity(col: Mapping[int, int], w: DirectedWalk) -> ParityCheck:
    """Compare the parity of the b-value against what the endpoints and length predict.

    Paths: ``i(first) + i(last) + length``; cycles: ``length``; ``i(x) = 1`` iff color 3.
    """
    _walk_colors(col, w)
    for u, v in w.directed_edges():
        if col[u] == col[v]:
            raise PreconditionError(f"walk edge ({u}, {v}) is monochromatic")
    b = b_value(col, w)
    if w.kind == "cycle":
        rhs = w.length
    else:
        rhs = _indicator(col[w.nodes[0]]) + _indicator(col[w.nodes[-1]]) + w.length
    return ParityCheck(b % 2 == rhs % 2, b, rhs % 2)


@dataclass(frozen=True)
class Certificate:
    """Evidence that a partial coloring has no proper completion."""

    kind: str
    payload: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "payload": self.payload}


def _require_walk_in_host(host, w: DirectedWalk) -> None:
    for u, v in w.directed_edges():
        if u not in host or v not in host:
            raise UnknownNodeError(f"walk leaves the host at ({u}, {v})")
        if v not in host.neighbors(u):
            raise PreconditionError(f"walk step ({u}, {v}) is not a host edge")


def cycle_zero_certificate(host, col: Mapping[int, int], c: DirectedWalk) -> Certificate | None:
    """Certificate when a simple cycle of a plain grid has nonzero b-value, else ``None``."""
    if getattr(host, "wrap_rows", False) or getattr(host, "wrap_cols", False):
        raise PreconditionError("the cycle argument only holds on grids without wrap-around")
    if c.kind != "cycle":
        raise PreconditionError("expected a cycle")
    if not c.is_simple():
        raise PreconditionError("cycle is not simple")
    _require_walk_in_host(host, c)
    b = b_value(col, c)
    if b == 0:
        return None
    return Certificate("grid_cycle", {"walk": list(c.nodes), "b": b})


def _row_orientation(host, c: DirectedWalk) -> tuple[int, int]:
    b = host.cols
    coords = [host.coord(v) for v in c.nodes]
    rows = {i for i, _ in coords}
    if c.kind != "cycle" or len(rows) != 1 or len(coords) != b:
        raise PreconditionError("expected a full row cycle")
    steps = {(coords[(t + 1) % b][1] - coords[t][1]) % b for t in range(b)}
    if steps == {1}:
        return rows.pop(), 1
    if steps == {b - 1}:
        return rows.pop(), -1
    raise PreconditionError("walk does not follow its row")


def torus_pair_certificate(host, col: Mapping[int, int], c1: DirectedWalk,
                           c2: DirectedWalk) -> Certificate | None:
    """Two row cycles traversed in opposite directions must have b-values summing to zero."""
    if not host.wrap_cols:
        raise PreconditionError("row cycles need wrapped columns")
    r1, o1 = _row_orientation(host, c1)
    r2, o2 = _row_orientation(host, c2)
    if o1 == o2:
        raise PreconditionError("the two row cycles must have opposite orientations")
    _require_walk_in_host(host, c1)
    _require_walk_in_host(host, c2)
    b1, b2 = b_value(col, c1), b_value(col, c2)
    if b1 + b2 == 0:
        return None
    return Certificate("torus_pair", {
        "rows": [r1, r2], "walks": [list(c1.nodes), list(c2.nodes)], "b": [b1, b2]})


def validate_certificate(cert: Certificate, host, col: Mapping[int, int]) -> bool:
    """Recompute a certificate from its walks and the host-side coloring."""
    try:
        if cert.kind == "grid_cycle":
            w = DirectedWalk(cert.payload["walk"], "cycle")
            again = cycle_zero_certificate(host, col, w)
        elif cert.kind == "torus_pair":
            c1, c2 = (DirectedWalk(x, "cycle") for x in cert.payload["walks"])
            again = torus_pair_certificate(host, col, c1, c2)
        elif cert.kind == "gadget_conflict":
            l1, l2 = cert.payload["gadgets"]
            kinds = {classify_gadget(host, l1, col).kind, classify_gadget(host, l2, col).kind}
            return kinds == {ROW_COLORFUL, COLUMN_COLORFUL}
        else:
            return False
    except (KeyError, PreconditionError, UnknownNodeError):
        return False
    return again is not None and again.payload == cert.payload


ROW_COLORFUL = "RowColorful"
COLUMN_COLORFUL = "ColumnColorful"
NEITHER = "Neither"
IMPROPER = "Improper"


@dataclass(frozen=True)
class GadgetClass:
    kind: str
    witness: int | None = None
    colorful_rows: tuple[int, ...] = ()
    colorful_cols: tuple[int, ...] = ()


def _gadget_colors(chain, ell: int, col: Mapping[int, int]) -> dict[tuple[int, int], int]:
    if not 1 <= ell <= chain.n_prime:
        raise PreconditionError(f"gadget {ell} out of range")
    k = chain.k
    out = {}
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            c = col.get(chain.id_of[(ell, i, j)])
            if c is None:
                raise PreconditionError(f"gadget {ell} is only partially colored")
            out[(i, j)] = c
    return out


def _gadget_conflict(cells: Mapping[tuple[int, int], int]) -> bool:
    items = list(cells.items())
    for x, ((i, j), c) in enumerate(items):
        for (p, q), d in items[x + 1:]:
            if i != p and j != q and c == d:
                return True
    return False


def classify_gadget(chain, ell: int, col: Mapping[int, int]) -> GadgetClass:
    cells = _gadget_colors(chain, ell, col)
    if _gadget_conflict(cells):
        return GadgetClass(IMPROPER)
    k = chain.k
    rows = tuple(i for i in range(1, k + 1)
                 if len({cells[(i, j)] for j in range(1, k + 1)}) == k)
    cols = tuple(j for j in range(1, k + 1)
                 if len({cells[(i, j)] for i in range(1, k + 1)}) == k)
    # rows take precedence; both lists are reported
    if rows:
        return GadgetClass(ROW_COLORFUL, rows[0], rows, cols)
    if cols:
        return GadgetClass(COLUMN_COLORFUL, cols[0], rows, cols)
    return GadgetClass(NEITHER, None, rows, cols)


def confined_colors(chain, ell: int, col: Mapping[int, int]) -> dict[int, tuple[str, int] | None]:
    """For each color used in gadget ``ell``: the row or column it is confined to, if any."""
    cells = _gadget_colors(chain, ell, col)
    if _gadget_conflict(cells):
        raise PreconditionError(f"gadget {ell} is improperly colored")
    k = chain.k
    out: dict[int, tuple[str, int] | None] = {}
    for c in sorted(set(cells.values())):
        rows = [i for i in range(1, k + 1)
                if sum(cells[(i, j)] == c for j in range(1, k + 1)) >= 2]
        cols = [j for j in range(1, k + 1)
                if sum(cells[(i, j)] == c for i in range(1, k + 1)) >= 2]
        if len(rows) + len(cols) > 1:
            raise PreconditionError(
                f"color {c} confined to rows {rows} and columns {cols}")
        out[c] = ("row", rows[0]) if rows else ("column", cols[0]) if cols else None
    return out


class ColoringStream:
    """Proper k-colorings in id order with ascending colors.

    Iterate to consume; ``truncated`` becomes True if ``limit`` cut the stream short.
    """

    def __init__(self, g: LabeledGraph, k: int, limit: int | None = None):
        if k < 1:
            raise PreconditionError("k must be positive")
        self.graph = g
        self.k = k
        self.limit = limit
        self.truncated = False
        self.count = 0

    def __iter__(self) -> Iterator[dict[int, int]]:
        g, k = self.graph, self.k
        order = sorted(g.nodes)
        index = {v: t for t, v in enumerate(order)}
        later = [[index[w] for w in g.neighbors(v) if index[w] > t] for t, v in enumerate(order)]
        n = len(order)
        colors = [0] * n
        # forbidden[t][c] counts colored earlier neighbours of t holding color c
        forbidden = [[0] * (k + 1) for _ in range(n)]
        full = (1 << k) - 1
        blocked = [0] * n

        def place(t, c, delta):
            for w in later[t]:
                f = forbidden[w]
                f[c] += delta
                if delta > 0 and f[c] == 1:
                    blocked[w] |= 1 << (c - 1)
                elif delta < 0 and f[c] == 0:
                    blocked[w] &= ~(1 << (c - 1))

        def rec(t):
            if t == n:
                yield {order[s]: colors[s] for s in range(n)}
                return
            for c in range(1, k + 1):
                if blocked[t] >> (c - 1) & 1:
                    continue
                colors[t] = c
                place(t, c, 1)
                if all(blocked[w] != full for w in later[t]):
                    yield from rec(t + 1)
                place(t, c, -1)
            colors[t] = 0

        for col in rec(0):
            if self.limit is not None and self.count >= self.limit:
                self.truncated = True
                return
            self.count += 1
            yield col


def enumerate_colorings(g: LabeledGraph, k: int, limit: int | None = None) -> ColoringStream:
    return ColoringStream(g, k, limit)


@dataclass(frozen=True)
class PartitionWitness:
    """Disjoint parts covering a node set, ordered by their smallest id."""

    parts: tuple[frozenset[int], ...]

    def __post_init__(self):
        parts = tuple(frozenset(p) for p in self.parts if p)
        seen: set[int] = set()
        for p in parts:
            if seen & p:
                raise PreconditionError("partition parts overlap")
            seen |= p
        object.__setattr__(self, "parts", tuple(sorted(parts, key=min)))

    @classmethod
    def from_coloring(cls, col: Mapping[int, int], nodes: Iterable[int] | None = None):
        nodes = col.keys() if nodes is None else nodes
        groups: dict[int, set[int]] = {}
        for v in nodes:
            groups.setdefault(col[v], set()).add(v)
        return cls(tuple(frozenset(p) for p in groups.values()))

    @property
    def nodes(self) -> frozenset[int]:
        return frozenset().union(*self.parts) if self.parts else frozenset()

    def label_of(self) -> dict[int, int]:
        return {v: s for s, p in enumerate(self.parts, 1) for v in p}

    def same_part(self, u: int, v: int) -> bool:
        lab = self.label_of()
        return lab[u] == lab[v]

    def restrict(self, nodes: Iterable[int]) -> "PartitionWitness":
        keep = set(nodes)
        return PartitionWitness(tuple(p & keep for p in self.parts))


def partition_signature(col: Mapping[int, int], nodes: Iterable[int]) -> tuple[int, ...]:
    """Relabel colors by first appearance in id order; equal signatures = equal same-part relation."""
    relabel: dict[int, int] = {}
    return tuple(relabel.setdefault(col[v], len(relabel)) for v in sorted(nodes))


@dataclass(frozen=True)
class LocalInference:
    ok: bool
    counterexample: tuple[dict, dict] | None = None
    colorings_checked: int = 0
    truncated: bool = False


def check_locally_inferable(g: LabeledGraph, k: int, ell: int, sub: Iterable[int],
                            limit: int | None = None) -> LocalInference:
    """Do all proper k-colorings of the radius-``ell`` ball around ``sub`` agree on ``sub``?

    The comparison is up to renaming colors.  A counterexample is a pair of
    restrictions to ``sub`` inducing different partitions.
    """
    sub = sorted(set(sub))
    if not sub:
        raise PreconditionError("empty node set")
    for v in sub:
        if v not in g:
            raise UnknownNodeError(v)
    if not is_connected_set(g, sub):
        raise PreconditionError("node set is not connected")
    region = induced_subgraph(g, ball(g, sub, ell))
    stream = enumerate_colorings(region, k, limit)
    first = None
    first_sig = None
    for col in stream:
        sig = partition_signature(col, sub)
        if first_sig is None:
            first, first_sig = {v: col[v] for v in sub}, sig
        elif sig != first_sig:
            return LocalInference(False, (first, {v: col[v] for v in sub}), stream.count)
    if first is None:
        return LocalInference(False, None, 0, stream.truncated)
    return LocalInference(True, None, stream.count, stream.truncated)


# vectorised evaluation for exhaustive sweeps

_A_TABLE = np.zeros((4, 4), dtype=np.int64)
for _x in THREE:
    for _y in THREE:
        _A_TABLE[_x, _y] = a_value(_x, _y)


def b_values_batch(colorings: np.ndarray, walks: list[DirectedWalk],
                   index: Mapping[int, int]) -> np.ndarray:
    """b-values for every (coloring, walk) pair.

    ``colorings`` has one row per coloring and one column per node, in the
    column order given by ``index`` (node -> column).  Returns an array of
    shape ``(len(colorings), len(walks))``.
    """
    colorings = np.asarray(colorings, dtype=np.int64)
    if colorings.size and (colorings.min() < 1 or colorings.max() > 3):
        raise PreconditionError("batch b-values need colors in 1..3")
    out = np.zeros((colorings.shape[0], len(walks)), dtype=np.int64)
    by_len: dict[int, list[int]] = {}
    for t, w in enumerate(walks):
        by_len.setdefault(w.length, []).append(t)
    for length, idx in by_len.items():
        if length == 0:
            continue
        src = np.array([[index[u] for u, _ in walks[t].directed_edges()] for t in idx])
        dst = np.array([[index[v] for _, v in walks[t].directed_edges()] for t in idx])
        vals = _A_TABLE[colorings[:, src], colorings[:, dst]]
        out[:, idx] = vals.sum(axis=2)
    return out


def simple_paths(g: LabeledGraph, max_length: int | None = None) -> Iterator[DirectedWalk]:
    """Every directed simple path (both orientations, zero-length included)."""
    for s in sorted(g.nodes):
        stack = [(s,)]
        while stack:
            p = stack.pop()
            yield DirectedWalk(p)
            if max_length is not None and len(p) - 1 >= max_length:
                continue
            for w in sorted(g.neighbors(p[-1]), reverse=True):
                if w not in p:
                    stack.append(p + (w,))


def simple_cycles(g: LabeledGraph) -> Iterator[DirectedWalk]:
    """Each undirected simple cycle once, starting at its smallest node."""
    for s in sorted(g.nodes):
        stack = [(s,)]
        while stack:
            p = stack.pop()
            last = p[-1]
            for w in sorted(g.neighbors(last)):
                if w == s and len(p) >= 3 and p[1] < p[-1]:
                    yield DirectedWalk(p, "cycle")
                elif w > s and w not in p:
                    stack.append(p + (w,))


def proper_on(g, col: Mapping[int, int], nodes: Iterable[int]) -> bool:
    nodes = set(nodes)
    for u in nodes:
        for v in g.neighbors(u):
            if v in nodes and col.get(u) is not None and col.get(u) == col.get(v):
                return False
    return True


__all__ = [
    "a_value", "b_value", "check_parity", "ParityCheck", "Certificate",
    "cycle_zero_certificate", "torus_pair_certificate", "GadgetClass",
    "classify_gadget", "confined_colors", "enumerate_colorings", "ColoringStream",
    "PartitionWitness", "partition_signature", "check_locally_inferable",
    "LocalInference", "b_values_batch", "simple_paths", "simple_cycles",
    "ROW_COLORFUL", "COLUMN_COLORFUL", "NEITHER", "IMPROPER",
]
