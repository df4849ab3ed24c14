"""Adversary strategies for the online coloring game, plus baseline opponents.

Lazy adversaries serve views from rigid coordinate frames and only decide
where (and in which orientation) each frame sits in the host when they commit.
The engine audits the commitment against every served view.
"""
from __future__ import annotations

from dataclasses import dataclass

from .analysis import (COLUMN_COLORFUL, ROW_COLORFUL, Certificate, b_value,
                       classify_gadget, cycle_zero_certificate,
                       torus_pair_certificate)
from .engine import (AlgorithmInterface, Commitment, DiscoveredView, GameSession,
                     host_ball_delta, register_algorithm, run_game_lazy)
from .errors import AdversaryError, PreconditionError
from .graph_core import DirectedWalk, canonical_edge
from .topologies import (ImplicitGridHost, build_gadget_chain, build_grid,
                         row_walk)


# baselines

class GreedyFirstFit(AlgorithmInterface):
    name = "greedy_first_fit"

    def __init__(self, palette: int = 3):
        self.palette = palette
        self.color: dict[int, int] = {}

    def step(self, i, v, view, seq) -> int:
        used = {self.color.get(w) for w in view.neighbors(v)}
        # a full neighbourhood has no free color; answer 1 and let the verdict catch it
        c = next((c for c in range(1, self.palette + 1) if c not in used), 1)
        self.color[v] = c
        return c


class FixedPattern(AlgorithmInterface):
    name = "fixed_pattern"

    def __init__(self, palette: int = 3):
        self.palette = palette

    def step(self, i, v, view, seq) -> int:
        return v % self.palette + 1


class Stubborn(AlgorithmInterface):
    name = "stubborn"

    def __init__(self, palette: int = 3):
        self.palette = palette

    def step(self, i, v, view, seq) -> int:
        return 1


BASELINES = {"greedy_first_fit": GreedyFirstFit, "fixed_pattern": FixedPattern,
             "stubborn": Stubborn}

for _name, _cls in BASELINES.items():
    register_algorithm(_name)(_cls)


def baseline(name: str, palette: int = 3) -> AlgorithmInterface:
    try:
        return BASELINES[name](palette)
    except KeyError:
        raise PreconditionError(f"unknown baseline {name!r}") from None


# reduction from G_{k+1} to G_k

class ReductionWrapper(AlgorithmInterface):
    """Colors G_k with k+1 colors by running an inner (k+2)-coloring algorithm on G_{k+1}.

    The inner algorithm sees the view lifted to G_{k+1}: every discovered node
    ``x`` comes with its duplicate ``n_k + x``, joined to ``x`` and to ``x``'s
    neighbours.  That lift is exactly the union of the inner balls.
    """

    name = "reduction"

    def __init__(self, inner: AlgorithmInterface, n_k: int):
        if inner.palette < 3:
            raise PreconditionError("the inner algorithm needs at least three colors")
        self.inner = inner
        self.n_k = n_k
        self.palette = inner.palette - 1
        self.lifted = DiscoveredView()
        self.inner_seq: list[int] = []
        self.dup_asked = 0

    def dup(self, x: int) -> int:
        return self.n_k + x

    def _lift(self, view) -> None:
        new = [x for x in view.nodes if x not in self.lifted]
        if not new:
            return
        for x in new:
            if not 1 <= x <= self.n_k:
                raise PreconditionError(f"node {x} outside 1..{self.n_k}")
        self.lifted._grow([y for x in new for y in (x, self.dup(x))], ())
        edges = set()
        for x in new:
            edges.add((x, self.dup(x)))
            for y in view.neighbors(x):
                edges.add(canonical_edge(x, y))
                edges.add(canonical_edge(self.dup(x), y))
                edges.add(canonical_edge(x, self.dup(y)))
        self.lifted._grow((), edges)

    def _ask(self, v: int) -> int:
        self.inner_seq.append(v)
        return self.inner.step(len(self.inner_seq), v, self.lifted, tuple(self.inner_seq))

    def step(self, i, v, view, seq) -> int:
        self._lift(view)
        c = self._ask(v)
        if c != self.inner.palette:
            return c
        self.dup_asked += 1
        c2 = self._ask(self.dup(v))
        if c2 == self.inner.palette:
            raise AdversaryError(
                f"inner algorithm gave the top color to both {v} and its duplicate")
        return c2


def reduction_wrapper(inner: AlgorithmInterface, layered_top) -> ReductionWrapper:
    """Wrap ``inner`` (built for ``layered_top``) into an algorithm for the layer graph below it."""
    return ReductionWrapper(inner, layered_top.layer_sizes[layered_top.k - 1])


# frames for lazy grid placement

class _Stop(Exception):
    pass


class GridFrame:
    """Rigid patch of grid coordinates holding served ids; placed in the host only at commit."""

    def __init__(self, adv: "_LazyGridAdversary"):
        self.adv = adv
        self.id_at: dict[tuple[int, int], int] = {}

    def reveal(self, p: tuple[int, int]) -> int:
        adv = self.adv
        T = adv.T
        r0, c0 = p
        new = []
        for dr in range(-T, T + 1):
            span = T - abs(dr)
            for dc in range(-span, span + 1):
                q = (r0 + dr, c0 + dc)
                if q not in self.id_at:
                    self.id_at[q] = adv.fresh_id()
                    new.append(q)
        edges = set()
        for r, c in new:
            x = self.id_at[(r, c)]
            for q in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                y = self.id_at.get(q)
                if y is not None:
                    edges.add(canonical_edge(x, y))
        session = adv.session
        color = session.reveal(self.id_at[p], [self.id_at[q] for q in new], edges)
        if session.finished or session.conflict is not None:
            raise _Stop
        return color

    def color(self, p) -> int:
        return self.adv.session.coloring[self.id_at[p]]

    def transform(self, mirror_sum: int | None = None, dr: int = 0, dc: int = 0) -> None:
        """Mirror columns as ``c -> mirror_sum - c`` (if given), then shift."""
        out = {}
        for (r, c), x in self.id_at.items():
            if mirror_sum is not None:
                c = mirror_sum - c
            out[(r + dr, c + dc)] = x
        self.id_at = out

    def absorb(self, other: "GridFrame") -> None:
        for (r, c) in other.id_at:
            for q in ((r, c), (r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                if q in self.id_at:
                    raise AdversaryError("placing frames would touch an already served region")
        self.id_at.update(other.id_at)
        other.id_at = {}
        self.adv.frames.remove(other)

    def row_ids(self, r: int, c_from: int, c_to: int) -> list[int]:
        step = 1 if c_to >= c_from else -1
        return [self.id_at[(r, c)] for c in range(c_from, c_to + step, step)]

    def col_ids(self, c: int, r_from: int, r_to: int) -> list[int]:
        step = 1 if r_to >= r_from else -1
        return [self.id_at[(r, c)] for r in range(r_from, r_to + step, step)]

    def bounds(self) -> tuple[int, int, int, int]:
        rows = [r for r, _ in self.id_at]
        cols = [c for _, c in self.id_at]
        return min(rows), max(rows), min(cols), max(cols)


@dataclass
class PathRegion:
    """A colored row path ``u -> v`` inside a frame; columns are frame-local, row 0."""

    frame: GridFrame
    u: int
    v: int
    b: int
    target: int
    lo: int
    hi: int
    T: int

    @property
    def region_length(self) -> int:
        return self.hi - self.lo + 2 * self.T

    def walk_ids(self) -> list[int]:
        return self.frame.row_ids(0, self.u, self.v)


class _LazyGridAdversary:
    def __init__(self, T: int, side: int):
        if T < 1:
            raise PreconditionError("locality must be at least 1")
        self.T = T
        self.side = side
        self.frames: list[GridFrame] = []
        self.session: GameSession | None = None
        self._next_id = 1
        self.stopped = False

    def fresh_id(self) -> int:
        x = self._next_id
        self._next_id += 1
        return x

    def new_frame(self) -> GridFrame:
        f = GridFrame(self)
        self.frames.append(f)
        return f

    def b_of(self, ids) -> int:
        return b_value(self.session.coloring, DirectedWalk(tuple(ids)))

    def commit(self, main: GridFrame | None = None) -> tuple[ImplicitGridHost, dict[int, int]]:
        """Stack frames vertically around the host centre, main frame first."""
        host = ImplicitGridHost(self.side, self.side)
        order = sorted(self.frames, key=lambda f: f is not main)
        emb: dict[int, int] = {}
        row = self.side // 2
        for f in order:
            if not f.id_at:
                continue
            r_lo, r_hi, c_lo, c_hi = f.bounds()
            dr = row - r_lo
            dc = self.side // 2 - (c_lo + c_hi) // 2
            if (r_lo + dr < 1 or r_hi + dr > self.side
                    or c_lo + dc < 1 or c_hi + dc > self.side):
                raise AdversaryError("host too small for the served frames")
            for (r, c), x in sorted(f.id_at.items()):
                emb[x] = host.touch(r + dr, c + dc)
            row = r_hi + dr + 3
        return host, emb

    # recursive b-value path

    def build_path(self, kappa: int) -> PathRegion:
        T = self.T
        if kappa == 0:
            f = self.new_frame()
            f.reveal((0, 0))
            return PathRegion(f, 0, 0, 0, 0, 0, 0, T)
        a = self.build_path(kappa - 1)
        if a.b >= kappa:
            return a
        bb = self.build_path(kappa - 1)
        if bb.b >= kappa:
            return bb
        if a.u > a.v:
            self._mirror(a)
        if bb.u > bb.v:
            self._mirror(bb)
        fa, fb = a.frame, bb.frame
        i_v = fa.color((0, a.v)) == 3
        i_s = fb.color((0, bb.u)) == 3
        gap = None
        for g in (2, 3):
            shift = a.hi + 2 * T + g - bb.lo
            length = bb.u + shift - a.v
            if (i_v + i_s + length) % 2 != (kappa - 1) % 2:
                gap = g
                break
        if gap is None:
            raise AssertionError("gap parity rule found no length")
        fb.transform(dr=0, dc=shift)
        fa.absorb(fb)
        s, t, hi = bb.u + shift, bb.v + shift, bb.hi + shift
        for c in range(a.hi + 1, bb.lo + shift):
            fa.reveal((0, c))
        u, v = a.u, a.v
        for x, y in ((v, s), (s, v), (u, t), (t, u)):
            b = self.b_of(fa.row_ids(0, x, y))
            if b >= kappa:
                region = PathRegion(fa, x, y, b, kappa, a.lo, hi, T)
                bound = 5 ** (kappa + 1) * T
                if region.region_length > bound:
                    raise AssertionError(f"region length {region.region_length} exceeds {bound}")
                return region
        raise AssertionError("no candidate path reached the target b-value")

    def _mirror(self, reg: PathRegion) -> None:
        total = reg.lo + reg.hi
        reg.frame.transform(mirror_sum=total)
        reg.u, reg.v = total - reg.u, total - reg.v


class BValuePathAdversary(_LazyGridAdversary):
    """Builds one row path with b-value at least ``target_k`` and stops."""

    def __init__(self, T: int, target_k: int, side: int | None = None):
        if target_k < 0:
            raise PreconditionError("target must be nonnegative")
        super().__init__(T, side if side is not None else 5 ** (target_k + 1) * T + 4 * T + 8)
        self.target_k = target_k
        self.region: PathRegion | None = None

    def play(self, session: GameSession) -> Commitment:
        self.session = session
        try:
            self.region = self.build_path(self.target_k)
        except _Stop:
            self.stopped = True
        host, emb = self.commit(self.region.frame if self.region else None)
        metrics = {"stopped_early": self.stopped}
        if self.region is not None:
            metrics.update(b=self.region.b, region_length=self.region.region_length)
        return Commitment(host, emb, None, metrics)


def build_bvalue_path(alg: AlgorithmInterface, T: int, target_k: int):
    """Run the path builder against ``alg``; returns ``(region, game_result)``."""
    adv = BValuePathAdversary(T, target_k)
    result = run_game_lazy(adv, alg, T)
    return adv.region, result


class RectangleAdversary(_LazyGridAdversary):
    """Closes a high b-value row path into a grid cycle whose b-value cannot vanish."""

    def __init__(self, T: int = 1, target_k: int = 9, side: int | None = None):
        if not target_k > 4 * T + 4:
            raise PreconditionError(f"target {target_k} must exceed 4T+4 = {4 * T + 4}")
        side = side if side is not None else 5 ** (target_k + 1) * T + 1
        if not 5 ** (target_k + 1) * T < side:
            raise PreconditionError("host side must exceed 5^(k+1) T")
        super().__init__(T, side)
        self.target_k = target_k
        self.b_parts: dict[str, int] = {}

    def play(self, session: GameSession) -> Commitment:
        self.session = session
        T = self.T
        main = None
        cycle_ids = None
        try:
            region = self.build_path(self.target_k)
            main = region.frame
            cu, cv = region.u, region.v
            top = 2 * T + 2
            f2 = self.new_frame()
            for c in range(min(cu, cv), max(cu, cv) + 1):
                f2.reveal((0, c))
            b_st = self.b_of(f2.row_ids(0, cv, cu))
            if b_st < 0:
                f2.transform(mirror_sum=cu + cv)
            f2.transform(dr=top)
            main.absorb(f2)
            for r in range(1, top):
                main.reveal((r, cv))
            for r in range(top - 1, 0, -1):
                main.reveal((r, cu))
            p_uv = main.row_ids(0, cu, cv)
            p_vs = main.col_ids(cv, 0, top)
            p_st = main.row_ids(top, cv, cu)
            p_tu = main.col_ids(cu, top, 0)
            self.b_parts = {"uv": self.b_of(p_uv), "vs": self.b_of(p_vs),
                            "st": self.b_of(p_st), "tu": self.b_of(p_tu)}
            cycle_ids = p_uv[:-1] + p_vs[:-1] + p_st[:-1] + p_tu[:-1]
        except _Stop:
            self.stopped = True
        host, emb = self.commit(main)
        cert = None
        if cycle_ids is not None:
            hcol = {emb[x]: c for x, c in session.coloring.items()}
            walk = DirectedWalk(tuple(emb[x] for x in cycle_ids), "cycle")
            cert = cycle_zero_certificate(host, hcol, walk)
        metrics = {"stopped_early": self.stopped, "b_parts": self.b_parts,
                   "materialized": host.materialized}
        return Commitment(host, emb, cert, metrics)


def grid_rectangle_adversary(alg: AlgorithmInterface, T: int = 1, target_k: int = 9):
    return run_game_lazy(RectangleAdversary(T, target_k), alg, T)


# torus

class TorusTwoRowAdversary:
    """Colors two far-apart rows of an odd torus, then orients the second row against the first."""

    def __init__(self, T: int, side: int, cylinder: bool = False):
        if side % 2 == 0:
            raise PreconditionError("the torus side must be odd")
        if side < 4 * T + 4:
            raise PreconditionError(f"side {side} below 4T+4 = {4 * T + 4}")
        if T < 1:
            raise PreconditionError("locality must be at least 1")
        self.T = T
        self.side = side
        self.cylinder = cylinder
        self.r1 = 1 + (T if cylinder else 0)
        self.r2 = self.r1 + 2 * T + 2
        self.b: tuple[int, int] | None = None

    def play(self, session: GameSession) -> Commitment:
        side, T = self.side, self.T
        host = build_grid(side, side, wrap_rows=not self.cylinder, wrap_cols=True)
        seen: set = set()
        stopped = False
        try:
            for r in (self.r1, self.r2):
                for j in range(1, side + 1):
                    v = host.node(r, j)
                    new, edges = host_ball_delta(host, v, T, seen)
                    session.reveal(v, new, edges)
                    if session.finished or session.conflict is not None:
                        raise _Stop
        except _Stop:
            stopped = True
        emb = None
        cert = None
        if not stopped:
            col = session.coloring
            c1 = row_walk(host, self.r1, 1, full_cycle=True)
            c2 = row_walk(host, self.r2, 1, direction="rev", full_cycle=True)
            b1, b2 = b_value(col, c1), b_value(col, c2)
            if b1 + b2 == 0:
                emb = self._mirror_second_patch(host)
            hcol = col if emb is None else {emb[x]: c for x, c in col.items()}
            cert = torus_pair_certificate(host, hcol, c1, c2)
            self.b = (b_value(hcol, c1), b_value(hcol, c2))
        metrics = {"stopped_early": stopped, "b": list(self.b) if self.b else None}
        return Commitment(host, emb, cert, metrics)

    def _mirror_second_patch(self, host) -> dict[int, int]:
        side = self.side
        emb = {}
        patch = set(range(self.r2 - self.T, self.r2 + self.T + 1))
        for v, (i, j) in host.coord_of.items():
            emb[v] = host.node(i, side + 1 - j) if i in patch else v
        return emb


def torus_two_row_adversary(alg: AlgorithmInterface, T: int = 1, side: int = 9,
                            cylinder: bool = False):
    return run_game_lazy(TorusTwoRowAdversary(T, side, cylinder), alg, T)


# gadget chain

class GadgetAdversary:
    """Colors both end gadgets first, then transposes the far end so their classes differ."""

    def __init__(self, T: int, k: int, n_prime: int):
        if k < 2:
            raise PreconditionError("k must be at least 2")
        if n_prime < 2 * T + 3:
            raise PreconditionError(
                f"n' = {n_prime} too short: the end balls meet unless n' >= 2T+3")
        self.T = T
        self.k = k
        self.n_prime = n_prime
        self.classes: tuple[str, str] | None = None
        self.transposed = False

    def play(self, session: GameSession) -> Commitment:
        k, npr, T = self.k, self.n_prime, self.T
        host = build_gadget_chain(k, npr)
        emb = {v: v for v in host.graph.nodes}
        inv = dict(emb)
        seen: set = set()

        def reveal(h):
            new, edges = host_ball_delta(host, h, T, seen)
            session.reveal(inv[h], [inv[x] for x in new],
                           [(inv[a], inv[b]) for a, b in edges])
            if session.finished:
                raise _Stop

        stopped = False
        try:
            for h in host.gadget(1) + host.gadget(npr):
                reveal(h)
            hcol = {emb[x]: c for x, c in session.coloring.items()}
            first = classify_gadget(host, 1, hcol).kind
            last = classify_gadget(host, npr, hcol).kind
            if first == last and first in (ROW_COLORFUL, COLUMN_COLORFUL):
                m = npr - T
                for ell in range(m, npr + 1):
                    for i in range(1, k + 1):
                        for j in range(1, k + 1):
                            emb[host.id_of[(ell, i, j)]] = host.id_of[(ell, j, i)]
                inv = {h: x for x, h in emb.items()}
                self.transposed = True
            for h in sorted(host.graph.nodes):
                if inv[h] not in session.coloring:
                    reveal(h)
        except _Stop:
            stopped = True
        hcol = {emb[x]: c for x, c in session.coloring.items()}
        cert = None
        try:
            self.classes = (classify_gadget(host, 1, hcol).kind,
                            classify_gadget(host, npr, hcol).kind)
        except PreconditionError:
            self.classes = None
        if self.classes and set(self.classes) == {ROW_COLORFUL, COLUMN_COLORFUL}:
            cert = Certificate("gadget_conflict", {"gadgets": [1, npr],
                                                   "classes": list(self.classes)})
        metrics = {"stopped_early": stopped, "transposed": self.transposed,
                   "classes": list(self.classes) if self.classes else None}
        return Commitment(host, emb, cert, metrics)


def gadget_adversary(alg: AlgorithmInterface, T: int = 2, k: int = 3, n_prime: int = 20):
    return run_game_lazy(GadgetAdversary(T, k, n_prime), alg, T)


STRATEGIES = {"bpath": BValuePathAdversary, "rectangle": RectangleAdversary,
              "torus": TorusTwoRowAdversary, "gadget": GadgetAdversary}
