"""Fill/dig local search over a packing state.

Every routine changes the packed value by a non-negative amount, so the
current value is itself monotone; the best solution is still tracked
explicitly for callers that snapshot mid-run.
"""
from __future__ import annotations

import csv
import random
import time
from dataclasses import dataclass, field
from typing import Sequence, TextIO

from .geometry import Point, doubled_signed_area
from .greedy import GreedyConfig, Packer, Unit, choose_push_direction, item_units, place_unit
from .model import PackingState, Solution
from .push import push


@dataclass
class LsConfig:
    time_limit_seconds: float | None = 60.0
    # logical budget; when set, runs are reproducible regardless of speed
    iterations: int | None = None
    p_fill: float = 0.5
    dig_radius: int | None = None
    dig_max_items: int | None = None
    fill_tries: int = 5
    # grid positions tried per fill call (random subset); None uses all
    fill_sample: int | None = 200
    # grid positions nearest the dig point that are probed afterwards
    dig_positions: int = 40
    p_vertex_dig: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.time_limit_seconds is None and self.iterations is None:
            raise ValueError("need a time limit or an iteration budget")
        if self.time_limit_seconds is not None and self.time_limit_seconds <= 0:
            raise ValueError("time_limit_seconds must be > 0")
        if self.iterations is not None and self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if not 0 <= self.p_fill <= 1 or not 0 <= self.p_vertex_dig <= 1:
            raise ValueError("probabilities must lie in [0, 1]")


@dataclass
class TraceRow:
    elapsed: float
    iteration: int
    best_value: int


@dataclass
class LocalSearch:
    state: PackingState
    positions: list[Point]
    pitch: int
    cfg: LsConfig
    greedy: GreedyConfig = field(default_factory=GreedyConfig)
    units: list[Unit] | None = None
    rng: random.Random | None = None
    trace: list[TraceRow] = field(default_factory=list)

    def __post_init__(self):
        self.rng = self.rng or random.Random(self.cfg.seed)
        if self.units is None:
            self.units = item_units(self.state.instance, self.greedy.utility)
        gcfg = GreedyConfig(
            n_grid_points=self.greedy.n_grid_points,
            random_tries_per_point=self.cfg.fill_tries,
            utility=self.greedy.utility,
            push_strategy=self.greedy.push_strategy,
            jitter_radius=self.greedy.jitter_radius,
            seed=self.greedy.seed,
            push=self.greedy.push,
        )
        self.packer = Packer(self.state, self.positions, self.pitch, gcfg, self.rng)
        self.container_area2 = doubled_signed_area(self.state.instance.container)

    # -- helpers

    def _free_area2(self) -> int:
        items = self.state.items
        return self.container_area2 - sum(items[i].doubled_area for i, _ in self.state.placements.values())

    def _unit_area2(self, u: Unit) -> int:
        items = self.state.items
        return sum(items[i].doubled_area for i, _ in u.members)

    def _open_units(self) -> list[Unit]:
        rem = self.state.remaining
        return [u for u in self.units if u.available(rem)]  # type: ignore[union-attr]

    # -- routines

    def fill(self, positions: Sequence[Point] | None = None) -> int:
        """Greedy insertion of unpacked copies; returns the value gained."""
        st = self.state
        if positions is None:
            positions = self.positions
            k = self.cfg.fill_sample
            if k is not None and k < len(positions):
                positions = self.rng.sample(positions, k)  # type: ignore[union-attr]
        before = st.total_value
        free = self._free_area2()
        for u in self._open_units():
            need = self._unit_area2(u)
            while u.available(st.remaining) and need <= free:
                if self.packer.try_unit(u, positions) is None:
                    break
                free -= need
        return st.total_value - before

    def eligible(self, v: Point) -> list[tuple[int, int]]:
        """(squared distance, pid) of the placements a dig at ``v`` may push."""
        st = self.state
        out = []
        for pid in st.placements:
            cx, cy = st.placed_centroid(pid)
            out.append(((cx - v[0]) ** 2 + (cy - v[1]) ** 2, pid))
        if self.cfg.dig_radius is not None:
            r2 = self.cfg.dig_radius ** 2
            out = [e for e in out if e[0] <= r2]
        if self.cfg.dig_max_items is not None:
            out = sorted(out)[: self.cfg.dig_max_items]
        return out

    def dig(self, v: Point) -> int:
        """Push items away from ``v``, then refill around it; returns net value change."""
        st = self.state
        before = st.total_value
        for _, pid in sorted(self.eligible(v), key=lambda e: (-e[0], e[1])):
            cx, cy = st.placed_centroid(pid)
            u = (cx - v[0], cy - v[1])
            if u != (0, 0):
                push(st, pid, u, self.packer.cfg.push)
        near = sorted(self.positions, key=lambda p: ((p[0] - v[0]) ** 2 + (p[1] - v[1]) ** 2, p))
        near = near[: self.cfg.dig_positions]
        for _pass in range(2):
            changed = False
            for u in self._open_units():
                while u.available(st.remaining):
                    outcome = self._insert_or_replace(u, near)
                    if outcome is None:
                        break
                    changed = True
                    if outcome:
                        # a swap may leave the counts unchanged; one per unit and pass
                        break
            if not changed:
                break
        return st.total_value - before

    def _insert_or_replace(self, unit: Unit, positions: Sequence[Point]) -> bool | None:
        """Place ``unit`` at the first probe with non-negative benefit.

        Returns None if no probe qualified, else whether placements were evicted.
        """
        st = self.state
        inst = st.instance
        items = st.items
        cx, cy = unit.centroid
        value = sum(items[i].value for i, _ in unit.members)
        for g in positions:
            for px, py in self.packer.probes(g):
                ref = (px - cx, py - cy)
                spots = [(i, (ref[0] + ox, ref[1] + oy)) for i, (ox, oy) in unit.members]
                if not all(inst.fits_container(i, t) for i, t in spots):
                    continue
                hit: set[int] = set()
                for i, t in spots:
                    hit.update(st.overlapping(i, t))
                if value - sum(items[st.placements[p][0]].value for p in hit) < 0:
                    continue
                for p in sorted(hit):
                    st.unplace(p)
                ids = place_unit(st, unit, ref)
                u = choose_push_direction(unit.metrics, self.packer.cfg.push_strategy, self.rng, self.packer.fixed_u)
                push(st, ids, u, self.packer.cfg.push)
                return bool(hit)
        return None

    def dig_point(self) -> Point:
        inst = self.state.instance
        rng = self.rng
        c = inst.container
        if rng.random() < self.cfg.p_vertex_dig:  # type: ignore[union-attr]
            return rng.choice(c)  # type: ignore[union-attr]
        x0, y0, x1, y1 = inst.box
        n = len(c)
        while True:
            p = (rng.randint(x0, x1), rng.randint(y0, y1))  # type: ignore[union-attr]
            if all(
                (c[(k + 1) % n][0] - c[k][0]) * (p[1] - c[k][1]) - (c[(k + 1) % n][1] - c[k][1]) * (p[0] - c[k][0]) >= 0
                for k in range(n)
            ):
                return p

    def step(self) -> int:
        if self.rng.random() < self.cfg.p_fill:  # type: ignore[union-attr]
            return self.fill()
        return self.dig(self.dig_point())

    def optimize(self) -> Solution:
        """Alternate fill and dig until the budget runs out; returns the best solution seen."""
        st = self.state
        best = st.solution()
        best_val = st.total_value
        start = time.perf_counter()
        it = 0
        self.trace.append(TraceRow(0.0, 0, best_val))
        while True:
            if self.cfg.iterations is not None and it >= self.cfg.iterations:
                break
            if self.cfg.time_limit_seconds is not None and time.perf_counter() - start >= self.cfg.time_limit_seconds:
                break
            gained = self.step()
            assert gained >= 0, "local search step lost value"
            it += 1
            if st.total_value > best_val:
                best_val = st.total_value
                best = st.solution()
            self.trace.append(TraceRow(time.perf_counter() - start, it, best_val))
        return best


def optimize(
    state: PackingState,
    positions: list[Point],
    pitch: int,
    cfg: LsConfig,
    greedy: GreedyConfig | None = None,
    units: list[Unit] | None = None,
) -> tuple[Solution, list[TraceRow]]:
    ls = LocalSearch(state, positions, pitch, cfg, greedy or GreedyConfig(), units)
    return ls.optimize(), ls.trace


def write_trace(rows: Sequence[TraceRow], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["elapsed", "iteration", "best_value"])
    for r in rows:
        w.writerow([f"{r.elapsed:.6f}", r.iteration, r.best_value])

