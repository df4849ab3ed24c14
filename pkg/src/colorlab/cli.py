"""Command-line entry point: ``colorlab {gen-graph,run-upper,run-adversary,check-invariants}``.

Exit codes: 0 expected outcome, 1 unexpected outcome, 2 bad arguments.
Reports are JSON with sorted keys, so identical invocations give identical bytes.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import adversaries as adv
from .analysis import (b_values_batch, check_locally_inferable, classify_gadget,
                       enumerate_colorings, simple_cycles, simple_paths,
                       COLUMN_COLORFUL, ROW_COLORFUL)
from .engine import ALGORITHM_WINS, make_algorithm, run_game_concrete, run_game_lazy
from .errors import ColorlabError, PreconditionError
from .topologies import (build_gadget_chain, build_grid, build_k_tree, build_layered,
                         build_triangular)
from .unify_color import UnifyColor

EXIT_OK, EXIT_UNEXPECTED, EXIT_USAGE = 0, 1, 2


def _dump(obj, path: str | None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=1)
    if path in (None, "-"):
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


# graph generation

def make_host(args):
    fam = args.family
    if fam == "grid":
        return build_grid(args.rows or args.side, args.cols or args.side)
    if fam == "torus":
        return build_grid(args.side, args.side, True, True)
    if fam == "cylinder":
        return build_grid(args.side, args.side, False, True)
    if fam == "tri":
        return build_triangular(args.d)
    if fam == "ktree":
        return build_k_tree(args.k - 1, args.n, args.attach, args.seed)
    if fam == "gadget":
        return build_gadget_chain(args.k, args.nprime)
    if fam == "layered":
        return build_layered(args.k, args.side)
    raise ColorlabError(f"unknown family {fam}")


def cmd_gen_graph(args) -> int:
    host = make_host(args)
    _dump(host.graph.to_dict(), args.out)
    if args.out not in (None, "-") and hasattr(host, "side_info"):
        _dump(host.side_info(), args.out + ".side.json")
    return EXIT_OK


# upper bound runs

_UPPER = {"grid": ("bipartite", 2), "tri": ("triangular", 3), "ktree": ("ktree", None),
          "layered": ("layered", None)}


def _upper_game(payload):
    family, k, host_args, order_seed, T = payload
    host = make_host(argparse.Namespace(**host_args))
    graph = host.graph
    order = sorted(graph.nodes)
    random.Random(order_seed).shuffle(order)
    alg = UnifyColor(k, len(graph), oracle_family=family, T=T)
    result = run_game_concrete(graph, order, alg, alg.T_total)
    return {"verdict": result.verdict, "reason": result.reason, **alg.stats(),
            "log2_n": alg.log_n}


def cmd_run_upper(args) -> int:
    family, k = _UPPER[args.family]
    k = k if k is not None else args.k
    if args.family == "grid":
        args.side = args.side or args.m
    rng = random.Random(args.seed)
    # one seed drives k-tree attachments and every reveal order
    host_args = {x: getattr(args, x) for x in ("family", "rows", "cols", "side", "d",
                                               "n", "attach", "nprime")}
    host_args.update(k=k, seed=rng.randrange(2 ** 32))
    payloads = [(family, k, host_args, rng.randrange(2 ** 32), args.T)
                for _ in range(args.orders)]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            games = list(pool.map(_upper_game, payloads))
    else:
        games = [_upper_game(p) for p in payloads]
    wins = sum(g["verdict"] == ALGORITHM_WINS for g in games)
    within = all(g["max_type_changes"] <= g["log2_n"] for g in games)
    hist: dict[str, int] = {}
    for g in games:
        key = str(g["max_type_changes"])
        hist[key] = hist.get(key, 0) + 1
    report = {"command": "run-upper", "parameters": _params(args),
              "verdict": "pass" if wins == len(games) and within else "fail",
              "metrics": {"games": len(games), "wins": wins,
                          "type_change_histogram": hist,
                          "per_game": [dict(g, game=t) for t, g in enumerate(games)]}}
    _finish(report, args)
    return EXIT_OK if report["verdict"] == "pass" else EXIT_UNEXPECTED


# adversary runs

def cmd_run_adversary(args) -> int:
    if args.strategy == "gadget":
        palette = 2 * args.k - 2
    else:
        palette = 3
    if args.alg in adv.BASELINES:
        alg = adv.baseline(args.alg, palette)
    else:
        alg = make_algorithm(args.alg, k=2, n=max(args.side or 2, 2) ** 2,
                             oracle_family="bipartite", T=args.inner_T, on_breach="clip")
    if args.strategy == "bpath":
        strategy = adv.BValuePathAdversary(args.T, args.k)
    elif args.strategy == "rectangle":
        strategy = adv.RectangleAdversary(args.T, args.k)
    elif args.strategy == "torus":
        strategy = adv.TorusTwoRowAdversary(args.T, args.side, cylinder=args.cylinder)
    else:
        strategy = adv.GadgetAdversary(args.T, args.k, args.nprime)
    result = run_game_lazy(strategy, alg, args.T)
    if args.strategy == "bpath":
        region = strategy.region
        expected = result.algorithm_loses or (region is not None and region.b >= args.k)
    else:
        expected = result.algorithm_loses and result.audit.ok
    report = {"command": "run-adversary", "parameters": _params(args),
              "verdict": result.verdict, "reason": result.reason,
              "audit": result.audit.to_dict(),
              "certificate": result.certificate.to_dict() if result.certificate else None,
              "metrics": result.metrics}
    if args.transcript:
        with open(args.transcript, "w") as fh:
            fh.write(result.transcript.to_json(full_views=not args.delta) + "\n")
    _finish(report, args)
    return EXIT_OK if expected else EXIT_UNEXPECTED


# invariant sweeps

def suite_bvalue(shapes=((3, 3), (3, 4))) -> dict:
    out = []
    for a, b in shapes:
        g = build_grid(a, b).graph
        nodes = sorted(g.nodes)
        index = {v: t for t, v in enumerate(nodes)}
        cols = np.array([[c[v] for v in nodes] for c in enumerate_colorings(g, 3)])
        cycles = list(simple_cycles(g))
        paths = list(simple_paths(g))
        cyc_b = b_values_batch(cols, cycles, index)
        path_b = b_values_batch(cols, paths, index)
        ind = (cols == 3).astype(np.int64)
        starts = np.array([index[p.nodes[0]] for p in paths])
        ends = np.array([index[p.nodes[-1]] for p in paths])
        lengths = np.array([p.length for p in paths])
        rhs = ind[:, starts] + ind[:, ends] + lengths
        out.append({"grid": f"{a}x{b}", "colorings": int(len(cols)),
                    "cycles": len(cycles), "paths": len(paths),
                    "cycle_b_zero_violations": int(np.count_nonzero(cyc_b)),
                    "path_parity_violations": int(np.count_nonzero((path_b - rhs) % 2))})
    return {"suite": "bvalue", "results": out,
            "violations": sum(r["cycle_b_zero_violations"] + r["path_parity_violations"]
                              for r in out)}


def suite_gadget(k: int = 3) -> dict:
    kinds = (ROW_COLORFUL, COLUMN_COLORFUL)
    single = build_gadget_chain(k, 1)
    n1 = bad1 = 0
    for col in enumerate_colorings(single.graph, 2 * k - 2):
        n1 += 1
        bad1 += classify_gadget(single, 1, col).kind not in kinds
    pair = build_gadget_chain(k, 2)
    n2 = bad2 = 0
    for col in enumerate_colorings(pair.graph, 2 * k - 2):
        n2 += 1
        bad2 += classify_gadget(pair, 1, col).kind != classify_gadget(pair, 2, col).kind
    return {"suite": "gadget", "results": [
        {"check": "single_gadget_exactly_one_class", "colorings": n1, "violations": bad1},
        {"check": "chain_pair_shares_class", "colorings": n2, "violations": bad2}],
        "violations": bad1 + bad2}


def sample_connected(g, rng: random.Random, size: int) -> list[int]:
    nodes = sorted(g.nodes)
    sub = {rng.choice(nodes)}
    while len(sub) < size:
        frontier = sorted({w for v in sub for w in g.neighbors(v)} - sub)
        if not frontier:
            break
        sub.add(rng.choice(frontier))
    return sorted(sub)


def suite_oracle(samples: int = 30, seed: int = 0) -> dict:
    rng = random.Random(seed)
    cases = [("grid_6x6", build_grid(6, 6).graph, 2, 0),
             ("triangular_d4", build_triangular(4).graph, 3, 1),
             ("2tree_n10", build_k_tree(2, 10, "random", seed).graph, 3, 1),
             ("layered_G3_4x4", build_layered(3, 4).graph, 3, 3)]
    out = []
    total = 0
    for name, g, k, ell in cases:
        bad = 0
        for _ in range(samples):
            sub = sample_connected(g, rng, rng.randint(1, 4))
            bad += not check_locally_inferable(g, k, ell, sub).ok
        out.append({"family": name, "samples": samples, "violations": bad})
        total += bad
    cyc = build_grid(1, 6, False, True).graph
    res = check_locally_inferable(cyc, 3, 0, [1, 2, 3])
    out.append({"family": "cycle_6_k3_ell0", "expect_counterexample": True,
                "counterexample_found": not res.ok})
    total += res.ok
    return {"suite": "oracle", "results": out, "violations": total}


SUITES = {"bvalue": suite_bvalue, "gadget": suite_gadget, "oracle": suite_oracle}


def cmd_check_invariants(args) -> int:
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    results = [SUITES[n]() for n in names]
    violations = sum(r["violations"] for r in results)
    report = {"command": "check-invariants", "parameters": _params(args),
              "verdict": "pass" if violations == 0 else "fail",
              "metrics": {"suites": results, "violations": violations}}
    _finish(report, args)
    return EXIT_OK if violations == 0 else EXIT_UNEXPECTED


# plumbing

def _params(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items())
            if k not in ("func", "out", "timing", "_start")}


def _finish(report: dict, args) -> None:
    if args.timing:
        report["wall_time"] = round(time.perf_counter() - args._start, 3)
    _dump(report, args.out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="colorlab", description="Online-LOCAL coloring games.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None, help="report path (stdout if omitted)")
        sp.add_argument("--timing", action="store_true",
                        help="add wall time to the report (breaks byte-for-byte reproducibility)")

    def host_flags(sp, families):
        sp.add_argument("--family", choices=families, required=True)
        sp.add_argument("--side", type=int, default=None)
        sp.add_argument("--rows", type=int, default=None)
        sp.add_argument("--cols", type=int, default=None)
        sp.add_argument("--m", type=int, default=None, help="grid side for run-upper")
        sp.add_argument("--d", type=int, default=None)
        sp.add_argument("--k", type=int, default=None)
        sp.add_argument("--n", type=int, default=None)
        sp.add_argument("--nprime", type=int, default=None)
        sp.add_argument("--attach", choices=("path", "random"), default="random")

    g = sub.add_parser("gen-graph", help="write a host graph as JSON")
    host_flags(g, ("grid", "torus", "cylinder", "tri", "ktree", "gadget", "layered"))
    common(g)
    g.set_defaults(func=cmd_gen_graph)

    u = sub.add_parser("run-upper", help="run unify-color on seeded reveal orders")
    host_flags(u, tuple(_UPPER))
    u.add_argument("--orders", type=int, default=10)
    u.add_argument("--T", type=int, default=None, help="override the inner locality")
    u.add_argument("--jobs", type=int, default=1)
    common(u)
    u.set_defaults(func=cmd_run_upper)

    a = sub.add_parser("run-adversary", help="play a lower-bound adversary against an algorithm")
    a.add_argument("--strategy", choices=sorted(adv.STRATEGIES), required=True)
    a.add_argument("--alg", default="greedy_first_fit")
    a.add_argument("--T", type=int, default=1)
    a.add_argument("--k", type=int, default=9)
    a.add_argument("--side", type=int, default=9)
    a.add_argument("--nprime", type=int, default=20)
    a.add_argument("--cylinder", action="store_true")
    a.add_argument("--inner-T", dest="inner_T", type=int, default=None,
                   help="inner locality when --alg is unify-color")
    a.add_argument("--transcript", default=None, help="write the game transcript here")
    a.add_argument("--delta", action="store_true", help="store per-step view additions only")
    common(a)
    a.set_defaults(func=cmd_run_adversary)

    c = sub.add_parser("check-invariants", help="exhaustive invariant sweeps")
    c.add_argument("--suite", choices=sorted(SUITES) + ["all"], default="all")
    common(c)
    c.set_defaults(func=cmd_check_invariants)
    return p


def _validate(args, parser) -> None:
    need = {"grid": ("side", "m", "rows"), "torus": ("side",), "cylinder": ("side",),
            "tri": ("d",), "ktree": ("k", "n"), "gadget": ("k", "nprime"),
            "layered": ("k", "side")}
    fam = getattr(args, "family", None)
    if fam is None:
        return
    opts = need[fam]
    if fam == "grid":
        if not (args.side or args.m or (args.rows and args.cols)):
            parser.error("grid needs --side, --m or --rows/--cols")
    elif any(getattr(args, o) is None for o in opts):
        parser.error(f"family {fam} needs " + ", ".join("--" + o for o in opts))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        _validate(args, parser)
    except SystemExit:
        return EXIT_USAGE
    args._start = time.perf_counter()
    try:
        return args.func(args)
    except PreconditionError as exc:
        # parameter values the builders reject count as invalid arguments
        parser.print_usage(sys.stderr)
        print(f"colorlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ColorlabError as exc:
        print(f"colorlab: {exc}", file=sys.stderr)
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
