"""Host graph families: grids (plain, cylindrical, toroidal, implicit), triangular
grids, k-trees, gadget chains and layered duplication graphs.

Every host keeps its geometry (coordinates, layers, attachment cliques) next to
a plain :class:`LabeledGraph`; algorithms only ever receive the latter.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations

from .errors import PreconditionError, UnknownNodeError
from .graph_core import DirectedWalk, LabeledGraph, induced_subgraph

Coord = tuple[int, ...]


class _Host:
    """Shared delegation to the underlying graph."""

    graph: LabeledGraph
    coord_of: dict[int, Coord]
    id_of: dict[Coord, int]

    def neighbors(self, v: int):
        return self.graph.neighbors(v)

    def __contains__(self, v) -> bool:
        return v in self.graph

    def __len__(self) -> int:
        return len(self.graph)

    @property
    def nodes(self):
        return self.graph.nodes

    @property
    def edges(self):
        return self.graph.edges

    def node(self, *coord) -> int:
        try:
            return self.id_of[tuple(coord)]
        except KeyError:
            raise UnknownNodeError(coord) from None

    def coord(self, v: int) -> Coord:
        try:
            return self.coord_of[v]
        except KeyError:
            raise UnknownNodeError(v) from None

    def side_info(self) -> dict:
        return {"coords": {str(v): list(c) for v, c in sorted(self.coord_of.items())}}


@dataclass(eq=False)
class GridHost(_Host):
    rows: int
    cols: int
    wrap_rows: bool
    wrap_cols: bool
    graph: LabeledGraph
    coord_of: dict[int, Coord]
    id_of: dict[Coord, int]

    def grid_neighbors(self, i: int, j: int) -> list[Coord]:
        return _grid_steps(i, j, self.rows, self.cols, self.wrap_rows, self.wrap_cols)


def _grid_steps(i, j, a, b, wrap_rows, wrap_cols) -> list[Coord]:
    out = []
    for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        ii, jj = i + di, j + dj
        if wrap_rows:
            ii = (ii - 1) % a + 1
        if wrap_cols:
            jj = (jj - 1) % b + 1
        if 1 <= ii <= a and 1 <= jj <= b and (ii, jj) != (i, j):
            out.append((ii, jj))
    return out


def build_grid(a: int, b: int, wrap_rows: bool = False, wrap_cols: bool = False) -> GridHost:
    """Row-major ids ``(i-1)*b + j`` on 1-indexed coordinates.

    Wrap edges that would duplicate an existing edge or form a loop (sides of
    length 1 or 2) are dropped so the graph stays simple.
    """
    if a < 1 or b < 1:
        raise PreconditionError("grid dimensions must be positive")
    id_of = {(i, j): (i - 1) * b + j for i in range(1, a + 1) for j in range(1, b + 1)}
    coord_of = {v: c for c, v in id_of.items()}
    edges = set()
    for (i, j), v in id_of.items():
        for c in _grid_steps(i, j, a, b, wrap_rows, wrap_cols):
            w = id_of[c]
            edges.add((min(v, w), max(v, w)))
    g = LabeledGraph(id_of.values(), edges)
    return GridHost(a, b, wrap_rows, wrap_cols, g, coord_of, id_of)


class ImplicitGridHost:
    """A simple ``rows x cols`` grid that only materialises touched coordinates.

    Ids are handed out from a counter on first touch, so the caller controls id
    order independently of geometry.
    """

    wrap_rows = False
    wrap_cols = False

    def __init__(self, rows: int, cols: int):
        if rows < 1 or cols < 1:
            raise PreconditionError("grid dimensions must be positive")
        self.rows = rows
        self.cols = cols
        self.coord_of: dict[int, Coord] = {}
        self.id_of: dict[Coord, int] = {}
        self._next = 1

    def _check(self, i: int, j: int) -> None:
        if not (1 <= i <= self.rows and 1 <= j <= self.cols):
            raise PreconditionError(f"coordinate ({i}, {j}) outside {self.rows}x{self.cols}")

    def touch(self, i: int, j: int) -> int:
        self._check(i, j)
        v = self.id_of.get((i, j))
        if v is None:
            v = self._next
            self._next += 1
            self.id_of[(i, j)] = v
            self.coord_of[v] = (i, j)
        return v

    def node(self, i: int, j: int) -> int:
        return self.touch(i, j)

    def coord(self, v: int) -> Coord:
        try:
            return self.coord_of[v]
        except KeyError:
            raise UnknownNodeError(v) from None

    def grid_neighbors(self, i: int, j: int) -> list[Coord]:
        return _grid_steps(i, j, self.rows, self.cols, False, False)

    def neighbors(self, v: int) -> list[int]:
        i, j = self.coord(v)
        return [self.touch(*c) for c in self.grid_neighbors(i, j)]

    def __contains__(self, v) -> bool:
        return v in self.coord_of

    def __len__(self) -> int:
        return self.rows * self.cols

    @property
    def materialized(self) -> int:
        return len(self.coord_of)


@dataclass(eq=False)
class TriangularGridHost(_Host):
    side: int
    graph: LabeledGraph
    coord_of: dict[int, Coord]
    id_of: dict[Coord, int]


def triangular_adjacent(p: Coord, q: Coord) -> bool:
    dx, dy = p[0] - q[0], p[1] - q[1]
    return abs(dx) + abs(dy) == 1 or (dx == -dy and dx in (-1, 1))


def build_triangular(d: int) -> TriangularGridHost:
    """Triangular grid on ``{(x, y) : x, y >= 0, x + y <= d}``.

    Besides unit steps, ``(x, y)`` is joined to ``(x+1, y-1)`` and ``(x-1, y+1)``;
    this is the diagonal that keeps every node on a triangle inside the region.
    Ids follow lexicographic ``(x, y)`` order.
    """
    if d < 1:
        raise PreconditionError("side length must be at least 1")
    coords = sorted((x, y) for x in range(d + 1) for y in range(d + 1 - x))
    id_of = {c: i + 1 for i, c in enumerate(coords)}
    edges = []
    for (x, y), v in id_of.items():
        for q in ((x + 1, y), (x, y + 1), (x + 1, y - 1)):
            w = id_of.get(q)
            if w is not None:
                edges.append((v, w))
    g = LabeledGraph(id_of.values(), edges)
    return TriangularGridHost(d, g, {v: c for c, v in id_of.items()}, id_of)


@dataclass(eq=False)
class KTreeHost:
    k: int
    graph: LabeledGraph
    order: tuple[int, ...]
    attachment: dict[int, tuple[int, ...]]
    cliques: list[tuple[int, ...]] = field(default_factory=list)

    def neighbors(self, v):
        return self.graph.neighbors(v)

    def __contains__(self, v):
        return v in self.graph

    def __len__(self):
        return len(self.graph)

    def side_info(self) -> dict:
        return {"attachment": {str(v): list(c) for v, c in sorted(self.attachment.items())}}


def build_k_tree(k: int, n: int, attach_rule: str = "path", seed: int = 0) -> KTreeHost:
    """k-tree on ids ``1..n`` grown from the clique ``1..k+1``.

    ``"path"`` glues each new node to the k most recently added nodes;
    ``"random"`` picks uniformly among all k-cliques seen so far.
    """
    if k < 1:
        raise PreconditionError("k must be at least 1")
    if n < k + 1:
        raise PreconditionError(f"a {k}-tree needs at least {k + 1} nodes")
    if attach_rule not in ("path", "random"):
        raise PreconditionError(f"unknown attach rule {attach_rule!r}")
    rng = random.Random(seed)
    base = tuple(range(1, k + 2))
    edges = list(combinations(base, 2))
    cliques = [base]
    kcliques = list(combinations(base, k))
    known = set(kcliques)
    attachment = {}
    for v in range(k + 2, n + 1):
        if attach_rule == "path":
            target = tuple(range(v - k, v))
        else:
            target = rng.choice(kcliques)
        attachment[v] = target
        edges.extend((u, v) for u in target)
        big = tuple(sorted(target + (v,)))
        cliques.append(big)
        for sub in combinations(big, k):
            if sub not in known:
                known.add(sub)
                kcliques.append(sub)
    g = LabeledGraph(range(1, n + 1), edges)
    return KTreeHost(k, g, tuple(range(1, n + 1)), attachment, cliques)


@dataclass(eq=False)
class GadgetChainHost(_Host):
    k: int
    n_prime: int
    graph: LabeledGraph
    coord_of: dict[int, Coord]
    id_of: dict[Coord, int]

    def gadget(self, ell: int) -> list[int]:
        k = self.k
        return [self.id_of[(ell, i, j)] for i in range(1, k + 1) for j in range(1, k + 1)]


def build_gadget_chain(k: int, n_prime: int) -> GadgetChainHost:
    """Chain of ``n_prime`` gadgets on ``[k] x [k]``; ids ``(l-1)k^2 + (i-1)k + j``."""
    if k < 2 or n_prime < 1:
        raise PreconditionError("need k >= 2 and at least one gadget")
    id_of = {}
    for ell in range(1, n_prime + 1):
        for i in range(1, k + 1):
            for j in range(1, k + 1):
                id_of[(ell, i, j)] = (ell - 1) * k * k + (i - 1) * k + j
    cells = [(i, j) for i in range(1, k + 1) for j in range(1, k + 1)]
    edges = []
    for ell in range(1, n_prime + 1):
        for (i, j), (p, q) in combinations(cells, 2):
            if i != p and j != q:
                edges.append((id_of[(ell, i, j)], id_of[(ell, p, q)]))
        if ell < n_prime:
            for i, j in cells:
                for p, q in cells:
                    if i != p and j != q:
                        edges.append((id_of[(ell, i, j)], id_of[(ell + 1, p, q)]))
    g = LabeledGraph(id_of.values(), edges)
    return GadgetChainHost(k, n_prime, g, {v: c for c, v in id_of.items()}, id_of)


@dataclass(eq=False)
class LayeredHost:
    k: int
    base: GridHost
    graph: LabeledGraph
    layer: dict[int, int]
    parent: dict[int, int]
    root: dict[int, int]
    layer_sizes: dict[int, int]

    def neighbors(self, v):
        return self.graph.neighbors(v)

    def __contains__(self, v):
        return v in self.graph

    def __len__(self):
        return len(self.graph)

    def duplicate(self, u: int, level: int | None = None) -> int:
        """Id of the copy of ``u`` created when building layer ``level`` (default: top)."""
        level = self.k if level is None else level
        if not 3 <= level <= self.k:
            raise PreconditionError(f"no duplication step builds layer {level}")
        below = self.layer_sizes[level - 1]
        if not 1 <= u <= below:
            raise UnknownNodeError(u)
        return below + u

    def truncate(self, k: int) -> "LayeredHost":
        if not 2 <= k <= self.k:
            raise PreconditionError(f"cannot truncate to {k}")
        keep = range(1, self.layer_sizes[k] + 1)
        g = induced_subgraph(self.graph, keep)
        return LayeredHost(
            k, self.base, g,
            {v: self.layer[v] for v in keep},
            {v: p for v, p in self.parent.items() if v in g},
            {v: self.root[v] for v in keep},
            {i: s for i, s in self.layer_sizes.items() if i <= k})

    def side_info(self) -> dict:
        return {
            "layer": {str(v): self.layer[v] for v in sorted(self.layer)},
            "parent": {str(v): p for v, p in sorted(self.parent.items())},
            "root": {str(v): self.root[v] for v in sorted(self.root)},
            "base_coords": {str(v): list(c) for v, c in sorted(self.base.coord_of.items())},
        }


def build_layered(k: int, base_side: int) -> LayeredHost:
    """Start from the ``base_side`` square grid and duplicate every node once per layer.

    When building layer ``i+1`` the copy of node ``u`` gets id ``n_i + u`` and is
    joined to ``u`` and to every neighbour ``u`` had in the previous layer graph.
    """
    if k < 2 or base_side < 2:
        raise PreconditionError("need k >= 2 and base_side >= 2")
    base = build_grid(base_side, base_side)
    adj = {v: set(base.graph.neighbors(v)) for v in base.graph.nodes}
    layer = {v: 2 for v in adj}
    parent: dict[int, int] = {}
    root = {v: v for v in adj}
    sizes = {2: len(adj)}
    for level in range(3, k + 1):
        n_prev = len(adj)
        snapshot = {u: frozenset(ns) for u, ns in adj.items()}
        for u in sorted(snapshot):
            d = n_prev + u
            adj[d] = set(snapshot[u]) | {u}
            for w in adj[d]:
                adj[w].add(d)
            layer[d] = level
            parent[d] = u
            root[d] = root[u]
        sizes[level] = len(adj)
    g = LabeledGraph._from_adjacency({v: frozenset(ns) for v, ns in adj.items()})
    return LayeredHost(k, base, g, layer, parent, root, sizes)


def grid_walk(host, coords, kind: str = "path") -> DirectedWalk:
    ids = [host.node(*c) for c in coords]
    walk = DirectedWalk(tuple(ids), kind)
    walk.validate(host)
    return walk


def row_walk(host, i: int, j_from: int = 1, j_to: int | None = None,
             direction: str = "fwd", full_cycle: bool = False) -> DirectedWalk:
    """Directed walk along row ``i`` from column ``j_from`` to ``j_to``.

    ``direction`` is ``"fwd"`` (increasing column) or ``"rev"``.  On a host with
    wrapped columns, ``full_cycle=True`` returns the whole row as a cycle that
    starts at ``j_from``.
    """
    if direction not in ("fwd", "rev"):
        raise PreconditionError(f"direction must be 'fwd' or 'rev', got {direction!r}")
    b = host.cols
    if not 1 <= i <= host.rows:
        raise PreconditionError(f"row {i} out of range")
    step = 1 if direction == "fwd" else -1
    if full_cycle:
        if not host.wrap_cols:
            raise PreconditionError("a full row cycle needs wrapped columns")
        if b < 3:
            raise PreconditionError("rows shorter than 3 do not form cycles")
        if not 1 <= j_from <= b:
            raise PreconditionError(f"column {j_from} out of range")
        cols = [(j_from - 1 + step * t) % b + 1 for t in range(b)]
        return grid_walk(host, [(i, j) for j in cols], "cycle")
    j_to = j_from if j_to is None else j_to
    for j in (j_from, j_to):
        if not 1 <= j <= b:
            raise PreconditionError(f"column {j} out of range")
    if host.wrap_cols:
        span = ((j_to - j_from) * step) % b
    else:
        span = (j_to - j_from) * step
        if span < 0:
            raise PreconditionError(f"cannot walk {direction} from column {j_from} to {j_to}")
    cols = [(j_from - 1 + step * t) % b + 1 for t in range(span + 1)]
    return grid_walk(host, [(i, j) for j in cols])


def column_walk(host, j: int, i_from: int, i_to: int) -> DirectedWalk:
    if not 1 <= j <= host.cols:
        raise PreconditionError(f"column {j} out of range")
    step = 1 if i_to >= i_from else -1
    return grid_walk(host, [(i, j) for i in range(i_from, i_to + step, step)])
