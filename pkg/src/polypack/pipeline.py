"""End-to-end solve: an initial solution, optional clusters, optional local search, replicas."""
from __future__ import annotations

import concurrent.futures
import os
import random
import time
from dataclasses import dataclass, field, replace

from .clusters import ClusterConfig, Cluster, default_graphs, clusters_as_items, generate_clusters, GraphKind
from .greedy import GreedyConfig, build_positions, greedy_state, item_units
from .ip import PartitionConfig, RefinementSchedule, auto_partition, partition_and_solve
from .local_search import LsConfig, LocalSearch, TraceRow
from .model import Instance, PackingState, Solution, verify


class InvariantError(RuntimeError):
    """A solver produced a solution that fails verification."""


@dataclass
class PipelineSpec:
    init: str = "greedy"  # greedy | ip | load
    solution: Solution | None = None  # for init == "load"
    greedy: GreedyConfig = field(default_factory=GreedyConfig)
    use_clusters: bool = False
    clusters: ClusterConfig = field(default_factory=ClusterConfig)
    cluster_graphs: tuple[GraphKind, ...] = (GraphKind.RAND, GraphKind.SKINNY, GraphKind.CONCAV)
    cluster_pool: list[Cluster] | None = None  # precomputed pool, skips generation
    ls: LsConfig | None = None
    partition: PartitionConfig | None = None  # None picks a grid from the copy count
    ip_uniform_per_item: int = 40
    ip_schedule: RefinementSchedule = field(default_factory=RefinementSchedule)
    seed: int = 0
    replicas: int = 1
    workers: int | None = None

    def __post_init__(self):
        if self.init not in ("greedy", "ip", "load"):
            raise ValueError(f"unknown init {self.init!r}")
        if self.init == "load" and self.solution is None:
            raise ValueError("init 'load' needs a solution")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")


@dataclass
class RunResult:
    solution: Solution
    value: int
    seed: int
    initial_value: int
    elapsed: float
    trace: list[TraceRow] = field(default_factory=list)


def _check(instance: Instance, sol: Solution, stage: str) -> None:
    rep = verify(instance, sol)
    if not rep.feasible:
        raise InvariantError(f"{stage} produced an infeasible solution:\n{rep.summary()}")


def run_once(instance: Instance, spec: PipelineSpec, seed: int) -> RunResult:
    start = time.perf_counter()
    gcfg = replace(spec.greedy, seed=seed)
    rng = random.Random(seed)
    units = None
    if spec.init == "greedy":
        if spec.use_clusters:
            pool = spec.cluster_pool
            if pool is None:
                ccfg = replace(spec.clusters, seed=seed)
                graphs = default_graphs(instance, ccfg, rng, spec.cluster_graphs)
                pool = generate_clusters(instance, graphs, ccfg, rng)
            units = clusters_as_items(pool, instance, spec.clusters, gcfg.utility)
        state, positions, pitch = greedy_state(instance, gcfg, units)
    else:
        if spec.init == "ip":
            part = spec.partition or auto_partition(instance)
            part = replace(part, uniform_per_item=spec.ip_uniform_per_item, schedule=spec.ip_schedule)
            sol = partition_and_solve(instance, part, rng)
        else:
            sol = spec.solution  # type: ignore[assignment]
        _check(instance, sol, spec.init)  # type: ignore[arg-type]
        state = PackingState.from_solution(instance, sol)  # type: ignore[arg-type]
        positions, pitch = build_positions(instance.container, gcfg.n_grid_points, random.Random(seed))
    initial = state.solution()
    _check(instance, initial, spec.init)
    trace: list[TraceRow] = []
    best = initial
    if spec.ls is not None:
        ls = LocalSearch(state, positions, pitch, replace(spec.ls, seed=seed), gcfg, item_units(instance, gcfg.utility))
        best = ls.optimize()
        trace = ls.trace
        _check(instance, best, "local search")
    return RunResult(best, best.value(instance), seed, initial.value(instance), time.perf_counter() - start, trace)


def _run_args(args):
    return run_once(*args)


def solve(instance: Instance, spec: PipelineSpec) -> tuple[RunResult, list[RunResult]]:
    """Run all replicas (seeds ``seed, seed+1, ...``); best value wins, lowest seed on ties."""
    seeds = [spec.seed + r for r in range(spec.replicas)]
    workers = spec.workers if spec.workers is not None else min(spec.replicas, os.cpu_count() or 1)
    if spec.replicas == 1 or workers <= 1:
        results = [run_once(instance, spec, s) for s in seeds]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_run_args, [(instance, spec, s) for s in seeds]))
    best = max(results, key=lambda r: (r.value, -r.seed))
    return best, results
