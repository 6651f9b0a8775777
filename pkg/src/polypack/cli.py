"""Command-line interface.

Exit codes: 0 success; 1 infeasible solution (verify); 2 input/output or
argument error; 3 internal invariant violation.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from typing import Sequence

from . import __version__
from .clusters import AreaMode, ClusterConfig, GraphKind, default_graphs, generate_clusters
from .generate import VALUE_MODES, generate
from .greedy import GreedyConfig, PushStrategy, UtilityKind
from .io import FormatError, load_clusters, load_instance, load_solution, save_clusters, save_instance, save_solution
from .ip import (
    CandidateSet,
    RefinementSchedule,
    build_conflict_graph,
    export_lp,
    neighborhood_candidates,
    sample_uniform,
)
from .local_search import LsConfig, write_trace
from .model import InstanceError, verify
from .pipeline import InvariantError, PipelineSpec, solve
from .render import write_svg

EXIT_OK, EXIT_INFEASIBLE, EXIT_IO, EXIT_INVARIANT = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


def read_config(path: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment; keys may use - or _."""
    out = {}
    with open(path, encoding="utf-8") as f:
        for ln, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{ln}: expected 'key = value'")
            k, v = (s.strip() for s in line.split("=", 1))
            out[k.replace("-", "_")] = v
    return out


def _graph_kinds(s: str) -> tuple[GraphKind, ...]:
    try:
        return tuple(GraphKind(x.strip()) for x in s.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"graph kinds must be from {[k.value for k in GraphKind]}") from None


def _cluster_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=1.5, help="value exponent in [1, 2]")
    p.add_argument("--m-per-item", type=int, default=4, help="clusters kept per item and generation")
    p.add_argument("--generations", type=int, default=4, help="largest cluster size")
    p.add_argument("--gauss-sigma", type=float, default=0.1)
    p.add_argument("--area-mode", choices=[m.value for m in AreaMode], default="hull")
    p.add_argument("--mix-lambda", type=float, default=0.5)
    p.add_argument("--assembly-points", type=int, default=100)
    p.add_argument("--max-partners", type=int, default=8)
    p.add_argument("--graphs", type=_graph_kinds, default=(GraphKind.RAND, GraphKind.SKINNY, GraphKind.CONCAV))


def _cluster_cfg(a: argparse.Namespace, seed: int) -> ClusterConfig:
    return ClusterConfig(
        alpha=a.alpha,
        m_per_item=a.m_per_item,
        max_generation=a.generations,
        gauss_sigma=a.gauss_sigma,
        area_mode=AreaMode(a.area_mode),
        mix_lambda=a.mix_lambda,
        grid_points_assembly=a.assembly_points,
        max_partners=a.max_partners,
        seed=seed,
    )


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polypack", description="Knapsack packing of polygons by translation.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="compute a packing")
    s.add_argument("instance")
    s.add_argument("--config", help="file of 'key = value' lines; flags win over it")
    s.add_argument("--init", choices=["greedy", "ip"], default="greedy")
    s.add_argument("--from-solution", help="start from this solution file instead")
    s.add_argument("--clusters", action="store_true", help="pack precomputed clusters as units")
    s.add_argument("--cluster-file", help="cluster pool written by the clusters command")
    s.add_argument("--utility", choices=[u.value for u in UtilityKind], default=UtilityKind.VALUE_PER_AREA.value)
    s.add_argument("--push-strategy", type=int, choices=[1, 2, 3, 4], default=3)
    s.add_argument("--grid-points", type=int, default=1000)
    s.add_argument("--tries", type=int, default=5, help="random probes around every grid point")
    s.add_argument("--ls-seconds", type=float, help="local search time limit")
    s.add_argument("--ls-iterations", type=int, help="local search iteration budget (reproducible)")
    s.add_argument("--p-fill", type=float, default=0.5)
    s.add_argument("--ip-per-item", type=int, default=40, help="uniform candidates per item")
    s.add_argument("--ip-rounds", type=int, default=4)
    s.add_argument("--ip-cells", type=int, help="partition the container into N x N cells")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--replicas", type=int, default=1)
    s.add_argument("--workers", type=int, help="processes for replicas (default: one per replica)")
    s.add_argument("--out", help="solution file to write")
    s.add_argument("--trace", help="CSV file for the local-search value trace")
    _cluster_args(s)

    v = sub.add_parser("verify", help="check a solution")
    v.add_argument("instance")
    v.add_argument("solution")

    r = sub.add_parser("render", help="draw a solution as SVG")
    r.add_argument("instance")
    r.add_argument("solution")
    r.add_argument("out")

    g = sub.add_parser("gen", help="write a synthetic instance")
    g.add_argument("kind", choices=["tiling", "convex", "polyomino"])
    g.add_argument("--n", type=int, default=5, help="k for tilings (k^2 squares), else the item count")
    g.add_argument("--values", choices=VALUE_MODES)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    e = sub.add_parser("export-lp", help="write the conflict-graph model in LP format")
    e.add_argument("instance")
    e.add_argument("out")
    e.add_argument("--per-item", type=int, default=20, help="uniform candidates per item")
    e.add_argument("--around", help="solution whose neighbourhood is sampled as well")
    e.add_argument("--sigma", type=float, default=10.0)
    e.add_argument("--neighbors", type=int, default=5)
    e.add_argument("--map", help="JSON file mapping each variable to its placement")
    e.add_argument("--seed", type=int, default=0)

    c = sub.add_parser("clusters", help="precompute a cluster pool")
    c.add_argument("instance")
    c.add_argument("out")
    c.add_argument("--seed", type=int, default=0)
    _cluster_args(c)
    return p


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        conf = read_config(args.config)
        sp = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
        subp = sp.choices[args.command]
        known = {a.dest: a for a in subp._actions}
        defaults = {}
        for k, raw in conf.items():
            if k not in known or k in ("instance", "config", "help"):
                raise ConfigError(f"unknown config key {k!r}")
            act = known[k]
            if isinstance(act, argparse._StoreTrueAction):
                defaults[k] = raw.lower() in ("1", "true", "yes", "on")
            else:
                val = act.type(raw) if act.type else raw
                if act.choices is not None and val not in act.choices:
                    raise ConfigError(f"config key {k!r}: {raw!r} not in {list(act.choices)}")
                defaults[k] = val
        subp.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def cmd_solve(a: argparse.Namespace) -> int:
    inst = load_instance(a.instance)
    gcfg = GreedyConfig(
        n_grid_points=a.grid_points,
        random_tries_per_point=a.tries,
        utility=UtilityKind(a.utility),
        push_strategy=PushStrategy(a.push_strategy),
        seed=a.seed,
    )
    ls = None
    if a.ls_seconds is not None or a.ls_iterations is not None:
        if a.ls_iterations != 0:
            ls = LsConfig(time_limit_seconds=a.ls_seconds, iterations=a.ls_iterations, p_fill=a.p_fill, seed=a.seed)
    ccfg = _cluster_cfg(a, a.seed)
    pool = load_clusters(a.cluster_file, inst, ccfg) if a.cluster_file else None
    init = "load" if a.from_solution else a.init
    part = None
    if a.ip_cells is not None:
        from .ip import PartitionConfig

        part = PartitionConfig(a.ip_cells, a.ip_cells)
    spec = PipelineSpec(
        init=init,
        solution=load_solution(a.from_solution) if a.from_solution else None,
        greedy=gcfg,
        use_clusters=a.clusters or pool is not None,
        clusters=ccfg,
        cluster_graphs=a.graphs,
        cluster_pool=pool,
        ls=ls,
        partition=part,
        ip_uniform_per_item=a.ip_per_item,
        ip_schedule=RefinementSchedule(rounds=a.ip_rounds),
        seed=a.seed,
        replicas=a.replicas,
        workers=a.workers,
    )
    t0 = time.perf_counter()
    best, runs = solve(inst, spec)
    elapsed = time.perf_counter() - t0
    if a.out:
        save_solution(best.solution, a.out, {"value": best.value, "seed": best.seed})
    if a.trace:
        with open(a.trace, "w", encoding="utf-8") as f:
            write_trace(best.trace, f)
    print(f"value={best.value} placements={len(best.solution)} elapsed={elapsed:.2f}s seed={best.seed}")
    return EXIT_OK


def cmd_verify(a: argparse.Namespace) -> int:
    inst = load_instance(a.instance)
    sol = load_solution(a.solution)
    rep = verify(inst, sol)
    print(rep.summary())
    return EXIT_OK if rep.feasible else EXIT_INFEASIBLE


def cmd_render(a: argparse.Namespace) -> int:
    inst = load_instance(a.instance)
    sol = load_solution(a.solution)
    bad = [k for k, p in enumerate(sol.placements) if not 0 <= p.item_index < len(inst.items)]
    if bad:
        raise FormatError(f"placements {bad} reference unknown items")
    write_svg(inst, sol, a.out)
    return EXIT_OK


def cmd_gen(a: argparse.Namespace) -> int:
    if a.n < 1:
        raise ConfigError("--n must be >= 1")
    inst = generate(a.kind, a.n, a.values, a.seed)
    save_instance(inst, a.out)
    print(f"{inst.name}: {len(inst.items)} items, {inst.total_copies} copies")
    return EXIT_OK


def cmd_export_lp(a: argparse.Namespace) -> int:
    inst = load_instance(a.instance)
    rng = random.Random(a.seed)
    cands = sample_uniform(inst, a.per_item, rng)
    if a.around:
        cands = neighborhood_candidates(inst, load_solution(a.around), a.sigma, a.neighbors, rng).union(cands)
    g = build_conflict_graph(cands, inst)
    export_lp(g, a.out)
    if a.map:
        with open(a.map, "w", encoding="utf-8") as f:
            json.dump(
                {f"x_{k}": [c.item_index, c.translation[0], c.translation[1]] for k, c in enumerate(g.candidates)},
                f,
                indent=1,
            )
    print(f"{g.n} variables, {len(g.edges)} overlap rows, {len(g.cliques)} capacity rows")
    return EXIT_OK


def cmd_clusters(a: argparse.Namespace) -> int:
    inst = load_instance(a.instance)
    cfg = _cluster_cfg(a, a.seed)
    rng = random.Random(a.seed)
    pool = generate_clusters(inst, default_graphs(inst, cfg, rng, a.graphs), cfg, rng)
    save_clusters(pool, inst.name, a.out)
    print(f"{len(pool)} clusters")
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "verify": cmd_verify,
    "render": cmd_render,
    "gen": cmd_gen,
    "export-lp": cmd_export_lp,
    "clusters": cmd_clusters,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(parser, argv)
    except SystemExit as e:
        return EXIT_IO if e.code else EXIT_OK
    except (OSError, ValueError, argparse.ArgumentTypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    try:
        return COMMANDS[args.command](args)
    except (OSError, FormatError, InstanceError, ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except (InvariantError, AssertionError) as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
