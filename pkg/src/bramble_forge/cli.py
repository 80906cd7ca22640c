"""bramble-forge command line.

Exit codes: 0 success, 1 certificate failure, 2 usage or parse error,
3 budget exceeded. Every report embeds the resolved configuration and the
library version; no output depends on wall-clock time or the environment.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .bramble import ORDER_BUDGET, Bramble, certificate_report
from .cutmatch import (
    DEFAULT_TARGET,
    AdversarialMatchingPlayer,
    FlowMatchingPlayer,
    RandomMatchingPlayer,
    run_game,
)
from .errors import BrambleForgeError, BudgetExceeded, DegenerateParameters, MaxRoundsExceeded
from .flow import ConcurrentFlow, flow_congestion, solve_concurrent_flow
from .graph import Graph, grid, load_graph
from .minors import find_clique_minor
from .pathsets import PathOfSetsSystem, compute_parameters, embed_and_assemble, grid_system, verify_system
from .sampler import SamplerConfig, sample_bramble

EXIT_OK, EXIT_CERT, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _read_graph(path: str) -> Graph:
    try:
        return load_graph(path)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read graph {path}: {exc}") from exc


def _read_vertices(path: str) -> list[int]:
    data = _read_json(path)
    if isinstance(data, dict):
        data = data.get("W", data.get("X", data.get("vertices")))
    if not isinstance(data, list):
        raise UsageError(f"{path}: expected a vertex list")
    return [int(v) for v in data]


def _stamp(report: dict, config: dict) -> dict:
    report["config"] = config
    report["version"] = __version__
    return report


# ---------------------------------------------------------------- commands


def cmd_certify(args) -> int:
    g = _read_graph(args.graph)
    try:
        b = Bramble.from_json(_read_json(args.bramble))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad bramble file: {exc}") from exc
    report = certificate_report(g, b, budget=args.budget)
    _stamp(report, {"command": "certify", "budget": args.budget})
    _emit(_dump(report), args.out)
    if not report["valid"]:
        return EXIT_CERT
    if report["order"] is None:
        return EXIT_BUDGET
    return EXIT_OK


def _flow_for(args, g: Graph, w: list[int]) -> ConcurrentFlow:
    if getattr(args, "flow", None):
        return ConcurrentFlow.from_json(_read_json(args.flow))
    return solve_concurrent_flow(g, w, k=args.k, iterations=args.iterations, eta=args.eta, seed=args.seed)


def cmd_flow(args) -> int:
    g = _read_graph(args.graph)
    w = _read_vertices(args.W)
    cf = solve_concurrent_flow(g, w, k=args.k, iterations=args.iterations, eta=args.eta, seed=args.seed)
    gamma, arg, _ = flow_congestion(cf)
    out = cf.to_json()
    out["gamma"] = gamma
    out["gamma_at"] = arg
    _stamp(out, {"command": "flow", "k": args.k, "iterations": args.iterations, "eta": args.eta, "seed": args.seed})
    _emit(_dump(out), args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    g = _read_graph(args.graph)
    w = _read_vertices(args.W)
    cf = _flow_for(args, g, w)
    cfg = SamplerConfig(
        k=args.k,
        delta=args.delta,
        ell=args.ell,
        lam=args.lam,
        family=args.family,
        family_cap=args.family_cap,
        seed=args.seed,
    )
    res = sample_bramble(g, cf, cfg, order_budget=args.budget)
    gamma, _, _ = flow_congestion(cf)
    out = res.to_json()
    out["flow"] = {"W": list(cf.w), "beta_eff": cf.beta_eff, "gamma": gamma}
    _stamp(out, {"command": "sample", "iterations": args.iterations, "eta": args.eta, **cfg.resolved(cf)})
    _emit(_dump(out), args.out)
    return EXIT_OK if res.report["valid"] else EXIT_CERT


def cmd_embed(args) -> int:
    if args.system:
        try:
            system = PathOfSetsSystem.from_json(_read_json(args.system))
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"bad system file: {exc}") from exc
    elif args.grid:
        _, system = grid_system(*args.grid)
    else:
        raise UsageError("embed needs --system or --grid H R")
    if args.verify:
        chk = verify_system(system, strong=True)
        if not chk:
            print(f"embed: system check failed: {chk.reason}", file=sys.stderr)
            return EXIT_CERT

    def finder(H, s):
        return find_clique_minor(H, target_t=args.t, attempts=args.attempts, seed=s)

    bramble, art = embed_and_assemble(system, clique_finder=finder, seed=args.seed, target_alpha=args.alpha)
    report = certificate_report(system.host, bramble, budget=args.budget)
    out = bramble.to_json()
    out["report"] = report
    out["transcript"] = art.to_json()
    _stamp(
        out,
        {
            "command": "embed",
            "alpha": args.alpha,
            "seed": args.seed,
            "grid": args.grid,
            "system": args.system,
            "attempts": args.attempts,
            "t": args.t,
        },
    )
    _emit(_dump(out), args.out)
    ok = report["valid"] and report["congestion"] <= 2
    return EXIT_OK if ok else EXIT_CERT


def cmd_cutmatch(args) -> int:
    if args.player == "flow":
        if not (args.graph and args.X):
            raise UsageError("--player flow needs --graph and --X")
        g = _read_graph(args.graph)
        x = _read_vertices(args.X)
        h = len(x)
        player = FlowMatchingPlayer(g, x)
    else:
        if args.h is None:
            raise UsageError("--h is required")
        h = args.h
        player = RandomMatchingPlayer([args.seed, 1]) if args.player == "random" else AdversarialMatchingPlayer()
    if h < 2 or h % 2:
        raise UsageError(f"h must be even and >= 2, got {h}")
    code = EXIT_OK
    try:
        res = run_game(h, player, target_alpha=args.alpha, max_rounds=args.max_rounds, seed=args.seed,
                       strategy=args.strategy)
    except MaxRoundsExceeded as exc:
        res = exc.partial
        code = EXIT_CERT
    out = res.transcript()
    out["converged"] = code == EXIT_OK
    _stamp(out, {"command": "cutmatch", "h": h, "seed": args.seed, "player": args.player, "alpha": args.alpha,
                 "max_rounds": args.max_rounds, "strategy": args.strategy})
    _emit(_dump(out), args.out)
    return code


def cmd_gridsys(args) -> int:
    _, system = grid_system(args.h, args.r)
    out = system.to_json()
    if args.verify:
        chk = verify_system(system, strong=True)
        out["check"] = {"ok": chk.ok, "reason": chk.reason}
    _stamp(out, {"command": "gridsys", "h": args.h, "r": args.r})
    _emit(_dump(out), args.out)
    return EXIT_OK if out.get("check", {"ok": True})["ok"] else EXIT_CERT


def _parse_q(terms) -> dict:
    q = {}
    for term in terms or ["0,0,1"]:
        try:
            i, j, coef = term.split(",")
            q[(int(i), int(j))] = float(coef)
        except ValueError as exc:
            raise UsageError(f"bad --q term {term!r}; expected i,j,coef") from exc
    return q


def cmd_params(args) -> int:
    try:
        params = compute_parameters(args.k, c=args.c, q=_parse_q(args.q), strict=False)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = params.to_json()
    _stamp(out, {"command": "params", "k": args.k, "c": args.c, "q": args.q or ["0,0,1"]})
    _emit(_dump(out), args.out)
    if params.degenerate:
        print(f"params: {DegenerateParameters.__name__}: h = {params.h} < 2", file=sys.stderr)
    return EXIT_OK


# ------------------------------------------------------------------- sweep

SAMPLE_COLUMNS = [
    "cell", "seed", "k", "delta", "ell", "lam", "family", "beta_eff",
    "valid", "pairwise_fraction", "congestion", "order_lb", "order", "error",
]
CUTMATCH_COLUMNS = [
    "cell", "seed", "h", "alpha_target", "rounds", "alpha", "method", "converged", "max_degree", "error",
]


def _cell_seed(base: int, index: int) -> int:
    return int(np.random.SeedSequence([base, index]).generate_state(1)[0])


def _sample_cell(job):
    index, params, g, cf = job
    row = {"cell": index, **{c: params.get(c) for c in ("seed", "k", "delta", "lam", "family")}}
    try:
        cfg = SamplerConfig(
            k=params["k"], delta=params["delta"], ell=params.get("ell"), lam=params["lam"],
            family=params.get("family"), family_cap=params.get("family_cap", 10_000), seed=params["seed"],
        )
        res = sample_bramble(g, cf, cfg, order_budget=params.get("budget", 20_000))
        rep = res.report
        row.update(
            ell=rep["ell"], family=rep["family_size"], beta_eff=cf.beta_eff, valid=rep["valid"],
            pairwise_fraction=rep["pairwise_fraction"], congestion=rep["congestion"],
            order_lb=rep["order_lb"], order=rep["order"], error="",
        )
    except (BrambleForgeError, ValueError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _cutmatch_cell(job):
    index, params = job
    h, seed = params["h"], params["seed"]
    row = {"cell": index, "seed": seed, "h": h, "alpha_target": params["alpha"]}
    try:
        player = RandomMatchingPlayer([seed, 1])
        try:
            res = run_game(h, player, target_alpha=params["alpha"], max_rounds=params.get("max_rounds"), seed=seed)
            converged = True
        except MaxRoundsExceeded as exc:
            res, converged = exc.partial, False
        row.update(
            rounds=res.rounds, alpha=res.certificate.alpha, method=res.certificate.method,
            converged=converged, max_degree=int(res.multigraph.degrees().max()), error="",
        )
    except (BrambleForgeError, ValueError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _graph_from_spec(spec) -> Graph:
    if isinstance(spec, str):
        return _read_graph(spec)
    if isinstance(spec, dict) and "grid" in spec:
        return grid(*spec["grid"])
    if isinstance(spec, dict) and "n" in spec:
        return Graph.from_json(spec)
    raise UsageError("sweep graph must be a path, {'grid': [a, b]} or graph JSON")


def run_sweep(spec: dict, jobs: int = 1) -> tuple[list[str], list[dict]]:
    kind = spec.get("kind", "sample")
    base = dict(spec.get("base", {}))
    axes = spec.get("vary", {})
    names = sorted(axes)
    cells = [dict(zip(names, combo)) for combo in itertools.product(*(axes[n] for n in names))]
    base_seed = int(base.get("seed", 0))
    params = []
    for i, cell in enumerate(cells):
        p = {**base, **cell}
        if "seed" not in cell:
            p["seed"] = _cell_seed(base_seed, i)
        params.append(p)

    if kind == "sample":
        columns = SAMPLE_COLUMNS
        if not params:
            return columns, []
        g = _graph_from_spec(spec["graph"])
        w = spec["W"]
        base.setdefault("k", 3 * len(w))
        for p in params:
            p.setdefault("k", base["k"])
            p.setdefault("delta", 0.25)
            p.setdefault("lam", 0.1)
        cf = solve_concurrent_flow(g, w, k=base["k"], iterations=int(base.get("iterations", 20)), seed=base_seed)
        work = [(i, p, g, cf) for i, p in enumerate(params)]
        fn = _sample_cell
    elif kind == "cutmatch":
        columns = CUTMATCH_COLUMNS
        for p in params:
            p.setdefault("alpha", DEFAULT_TARGET)
        work = list(enumerate(params))
        fn = _cutmatch_cell
    else:
        raise UsageError(f"unknown sweep kind {kind!r}")
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(fn, work))
    else:
        rows = [fn(job) for job in work]
    return columns, rows


def cmd_sweep(args) -> int:
    spec = _read_json(args.spec)
    if not isinstance(spec, dict):
        raise UsageError("sweep spec must be a JSON object")
    jobs = args.jobs if args.jobs is not None else int(os.environ.get("BRAMBLE_FORGE_JOBS", "1"))
    try:
        columns, rows = run_sweep(spec, jobs=max(1, jobs))
    except KeyError as exc:
        raise UsageError(f"sweep spec is missing {exc}") from exc
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    _emit(buf.getvalue(), args.out)
    if args.jsonl:
        with open(args.jsonl, "w") as fh:
            for row in rows:
                fh.write(json.dumps({**row, "version": __version__}, sort_keys=True) + "\n")
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bramble-forge", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="validity, congestion and order of a bramble")
    p.add_argument("--graph", required=True)
    p.add_argument("--bramble", required=True)
    p.add_argument("--budget", type=int, default=ORDER_BUDGET)
    p.add_argument("--out")
    p.set_defaults(func=cmd_certify)

    def flow_opts(p):
        p.add_argument("--graph", required=True)
        p.add_argument("--W", required=True)
        p.add_argument("--k", type=float, required=True)
        p.add_argument("--iterations", type=int, default=20)
        p.add_argument("--eta", type=float, default=None)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out")

    p = sub.add_parser("flow", help="concurrent flow on a hub set")
    flow_opts(p)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("sample", help="sample a family of closed walks (pipeline B)")
    flow_opts(p)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--ell", type=int)
    p.add_argument("--lambda", dest="lam", type=float, default=0.1)
    p.add_argument("--family", type=int)
    p.add_argument("--family-cap", type=int, default=10_000)
    p.add_argument("--flow", help="reuse a flow JSON instead of solving")
    p.add_argument("--budget", type=int, default=200_000, help="order search nodes")
    p.set_defaults(func=cmd_sample)

    for name in ("embed", "pipeline-a"):
        p = sub.add_parser(name, help="congestion-2 bramble from a path-of-sets system (pipeline A)")
        p.add_argument("--system")
        p.add_argument("--grid", type=int, nargs=2, metavar=("H", "R"))
        p.add_argument("--alpha", type=float, default=DEFAULT_TARGET)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--attempts", type=int, default=20)
        p.add_argument("--t", type=int, default=None, help="cap on the clique size")
        p.add_argument("--verify", action="store_true", help="run the strong-system verifier first")
        p.add_argument("--budget", type=int, default=ORDER_BUDGET)
        p.add_argument("--out")
        p.set_defaults(func=cmd_embed)

    p = sub.add_parser("cutmatch", help="play the cut-matching game")
    p.add_argument("--h", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--player", choices=("random", "flow", "adversarial"), default="random")
    p.add_argument("--graph")
    p.add_argument("--X")
    p.add_argument("--alpha", type=float, default=DEFAULT_TARGET)
    p.add_argument("--max-rounds", type=int)
    p.add_argument("--strategy", choices=("projection", "random"), default="projection")
    p.add_argument("--out")
    p.set_defaults(func=cmd_cutmatch)

    p = sub.add_parser("gridsys", help="explicit strong path-of-sets system on a grid")
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gridsys)

    p = sub.add_parser("params", help="width and length for treewidth k")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--q", action="append", help="polynomial term i,j,coef (repeatable)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("sweep", help="parameter sweep to CSV")
    p.add_argument("--spec", required=True)
    p.add_argument("--out")
    p.add_argument("--jsonl")
    p.add_argument("--jobs", type=int)
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except BrambleForgeError as exc:
        print(f"{args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CERT


if __name__ == "__main__":
    sys.exit(main())
