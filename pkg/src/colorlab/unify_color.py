"""(k+1)-coloring online algorithm for graphs whose k-partition is locally inferable.

Seen nodes form groups (connected components).  Each group carries a type:
a map from oracle part labels to colors in ``1..k``.  Merging groups with
different types rewrites the smaller ones by swapping colors through a
spare color ``k+1``, one committed layer at a time.
"""
from __future__ import annotations

import math
from collections import Counter

from .engine import AlgorithmInterface, register_algorithm
from .errors import BudgetBreach, PreconditionError
from .graph_core import bfs_distances
from .oracles import FAMILY_RADIUS, OracleConfig, oracle_partition


def ceil_log2(n: int) -> int:
    if n < 1:
        raise PreconditionError("n must be positive")
    return (n - 1).bit_length()


def inner_locality(k: int, n: int) -> int:
    return 3 * (k - 1) * ceil_log2(n)


class Group:
    __slots__ = ("gid", "nodes", "committed", "pi", "min_id")

    def __init__(self, gid: int, nodes: set, pi: dict):
        self.gid = gid
        self.nodes = nodes
        self.committed: set = set()
        self.pi = pi
        self.min_id = min(nodes)

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def frontier(self) -> set:
        return self.committed


class UnifyColor(AlgorithmInterface):
    name = "unify-color"

    def __init__(self, k: int, n: int, ell: int | None = None, oracle_family: str = "generic",
                 T: int | None = None, check_invariants: bool = False,
                 on_breach: str = "raise", use_flip: bool = False):
        if k < 2:
            raise PreconditionError("k must be at least 2")
        if ell is None:
            ell = k if oracle_family == "layered" else FAMILY_RADIUS.get(oracle_family)
            if ell is None:
                raise PreconditionError("the generic oracle family needs an explicit radius")
        if on_breach not in ("raise", "clip"):
            raise PreconditionError("on_breach is 'raise' or 'clip'")
        if use_flip and k != 2:
            raise PreconditionError("the parity flip needs k = 2")
        self.k = k
        self.n = n
        self.ell = ell
        self.palette = k + 1
        self.oracle = OracleConfig(oracle_family, k, ell)
        self.T = inner_locality(k, n) if T is None else T
        self.log_n = ceil_log2(n)
        self.check_invariants = check_invariants
        self.on_breach = on_breach
        self.use_flip = use_flip

        self.view = None
        self.seen: set = set()
        self.depth: dict[int, int] = {}
        self.group_of: dict[int, Group] = {}
        self.groups: dict[int, Group] = {}
        self.label: dict[int, int] = {}
        self.color: dict[int, int] = {}
        self.counter: Counter = Counter()
        self.merge_log: list[tuple[int, int]] = []
        self.cases: Counter = Counter()
        self.swaps = 0
        self.breaches = 0
        self.oracle_calls = 0
        self.invariant_violations: list[tuple[int, int]] = []
        self._next_gid = 1

    @property
    def T_total(self) -> int:
        return self.T + self.ell

    def step(self, i, v, view, seq) -> int:
        return self.on_reveal(v, view)

    # reveal handling

    def on_reveal(self, u: int, view) -> int:
        self.view = view
        if u not in view:
            raise PreconditionError(f"revealed node {u} is not in the view")
        if len(self.groups) == 1 and u in self.seen and len(self.seen) == len(view):
            # one group already covers the whole view: nothing can change
            self.cases[2] += 1
            return self._emit(u, self.group_of[u])
        dist = bfs_distances(view, [u], self.T + 1)
        ball_t = {x for x, d in dist.items() if d <= self.T}
        for x in ball_t:
            d = dist[x]
            if d < self.depth.get(x, d + 1):
                self.depth[x] = d
        touched = {}
        for x in dist:
            g = self.group_of.get(x)
            if g is not None:
                touched[g.gid] = g
        new_nodes = ball_t - self.seen
        if not touched:
            self.cases[1] += 1
            g = self._open_group(u, ball_t)
        else:
            groups = sorted(touched.values(), key=lambda g: (-g.size, g.min_id))
            self.cases[2 if len(groups) == 1 else 3] += 1
            if len(groups) == 1 and not new_nodes:
                g = groups[0]
            else:
                g = self._merge(groups, ball_t)
        self.seen |= ball_t
        color = self._emit(u, g)
        if self.check_invariants:
            bad = self.frontier_violations()
            self.invariant_violations.extend(bad)
        return color

    def _emit(self, u: int, g: Group) -> int:
        c = self.color.get(u)
        if c is None:
            c = g.pi[self.label[u]]
            self._commit(g, u, c)
        return c

    def _commit(self, g: Group, v: int, c: int) -> None:
        self.color[v] = c
        g.committed.add(v)

    def _query(self, nodes) -> dict[int, int]:
        self.oracle_calls += 1
        pw = oracle_partition(self.oracle, self.view, nodes)
        return {v: s for s, part in enumerate(pw.parts, 1) for v in part}

    def _open_group(self, u: int, ball_t: set) -> Group:
        lab = self._query(ball_t)
        first = lab[u]
        rest = iter(range(2, self.k + 1))
        pi = {s: 1 if s == first else next(rest) for s in range(1, self.k + 1)}
        g = Group(self._next_gid, set(ball_t), pi)
        self._next_gid += 1
        self.groups[g.gid] = g
        for x in ball_t:
            self.group_of[x] = g
        self.label.update(lab)
        return g

    def _type_in(self, g: Group, lab: dict[int, int]) -> dict[int, int]:
        """Group ``g``'s type rewritten over the labels of a fresh partition."""
        out: dict[int, int] = {}
        for v in g.nodes:
            s = lab[v]
            if s not in out:
                out[s] = g.pi[self.label[v]]
            if len(out) == self.k:
                break
        return out

    def _complete(self, partial: dict[int, int], prefer: dict[int, int] | None = None) -> dict[int, int]:
        pi = dict(partial)
        used = set(pi.values())
        if prefer:
            for s in range(1, self.k + 1):
                if s not in pi and prefer[s] not in used:
                    pi[s] = prefer[s]
                    used.add(prefer[s])
        free = iter(c for c in range(1, self.k + 1) if c not in used)
        for s in range(1, self.k + 1):
            if s not in pi:
                pi[s] = next(free)
        return pi

    def _merge(self, groups: list[Group], ball_t: set) -> Group:
        merged = set(ball_t)
        for g in groups:
            merged |= g.nodes
        lab = self._query(merged)
        c1 = groups[0]
        pi1 = self._complete(self._type_in(c1, lab))
        for x in groups[1:]:
            pi_x = self._complete(self._type_in(x, lab), prefer=pi1)
            for v in x.nodes:
                self.label[v] = lab[v]
            x.pi = pi_x
            if pi_x != pi1:
                self.unify_type(x, pi1, len(merged))
        for g in groups[1:]:
            c1.committed |= g.committed
            del self.groups[g.gid]
        c1.nodes = merged
        c1.min_id = min(c1.min_id, min(merged))
        c1.pi = pi1
        for v in merged:
            self.group_of[v] = c1
        self.label.update(lab)
        return c1

    def unify_type(self, x: Group, target: dict[int, int], merged_size: int | None = None) -> int:
        """Rewrite ``x``'s type to ``target`` with at most k-1 swaps; returns the swap count."""
        before = x.size
        swaps = 0
        if self.use_flip:
            self.flip_parity(x)
            swaps = 1
        else:
            for s in range(1, self.k + 1):
                if x.pi[s] != target[s]:
                    self.swap_colors(x, x.pi[s], target[s])
                    swaps += 1
        if x.pi != target:
            raise AssertionError("type unification did not reach the target")
        for v in x.nodes:
            self.counter[v] += 1
        self.merge_log.append((before, merged_size if merged_size is not None else before))
        return swaps

    # color swapping

    def swap_colors(self, x: Group, i1: int, i2: int) -> None:
        k = self.k
        if i1 == i2:
            raise PreconditionError("swap needs two distinct colors")
        used = set(x.pi.values())
        if i1 not in used or i2 not in used or not (1 <= i1 <= k and 1 <= i2 <= k):
            raise PreconditionError("both swapped colors must be in use and at most k")
        frontier = set(x.committed)
        frontier = self.change_index(x, i1, k + 1, frontier)
        frontier = self.change_index(x, i2, i1, frontier)
        self.change_index(x, k + 1, i2, frontier)
        self.swaps += 1

    def change_index(self, x: Group, i: int, j: int, frontier: set | None = None) -> set:
        """Replace color ``i`` by ``j`` in ``x``'s type and commit one layer around ``frontier``."""
        used = set(x.pi.values())
        if i not in used or j in used:
            raise PreconditionError(f"change_index({i}, {j}) needs {i} used and {j} unused")
        if frontier is None:
            frontier = set(x.committed)
        ring = self._ring(x, frontier)
        for v in sorted(ring):
            c = x.pi[self.label[v]]
            self._commit(x, v, j if c == i else c)
        for s, c in x.pi.items():
            if c == i:
                x.pi[s] = j
        return frontier | ring

    def _ring(self, x: Group, frontier: set) -> set:
        ring = set()
        for v in frontier:
            if self.depth.get(v, self.T) >= self.T:
                self._breach(f"frontier node {v} sits on the group boundary")
                continue
            for w in self.view.neighbors(v):
                if w in frontier or w in ring:
                    continue
                if w not in x.nodes:
                    self._breach(f"commit of {w} would leave group {x.gid}")
                    continue
                if w in self.color:
                    # committed earlier but not yet tracked in this frontier
                    continue
                ring.add(w)
        return ring

    def _breach(self, msg: str) -> None:
        self.breaches += 1
        if self.on_breach == "raise":
            raise BudgetBreach(msg)

    def flip_parity(self, a: Group) -> None:
        """Three-step parity flip for k = 2, with color 3 as the barrier."""
        if self.k != 2:
            raise PreconditionError("flip_parity needs k = 2")
        for src, dst in ((1, 2), (2, 3), (3, 1)):
            layer = set()
            for v in a.committed:
                if self.color[v] != src:
                    continue
                if self.depth.get(v, self.T) >= self.T:
                    self._breach(f"node {v} sits on the group boundary")
                    continue
                for w in self.view.neighbors(v):
                    if w in self.color:
                        continue
                    if w not in a.nodes:
                        self._breach(f"commit of {w} would leave group {a.gid}")
                        continue
                    layer.add(w)
            for w in sorted(layer):
                self._commit(a, w, dst)
        a.pi = {s: 3 - c for s, c in a.pi.items()}
        self.swaps += 1

    # diagnostics

    def frontier_violations(self) -> list[tuple[int, int]]:
        """Committed nodes next to an uncommitted one whose color disagrees with their group type."""
        bad = []
        for g in self.groups.values():
            for v in g.committed:
                if any(w not in self.color for w in self.view.neighbors(v)):
                    if self.color[v] != g.pi[self.label[v]]:
                        bad.append((v, self.color[v]))
        return sorted(bad)

    def stats(self) -> dict:
        return {"T": self.T, "T_total": self.T_total, "groups": len(self.groups),
                "cases": {str(c): self.cases[c] for c in sorted(self.cases)},
                "swaps": self.swaps, "oracle_calls": self.oracle_calls,
                "max_type_changes": max(self.counter.values(), default=0),
                "breaches": self.breaches}


@register_algorithm("unify-color")
def _make_unify(k: int, n: int, ell: int | None = None, oracle_family: str = "generic", **kw):
    return UnifyColor(k, n, ell=ell, oracle_family=oracle_family, **kw)
