"""Greedy construction: utility-ordered items dropped on a shuffled lattice, then pushed."""
from __future__ import annotations

import enum
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .geometry import GeometryError, Point, ShapeMetrics, doubled_signed_area, round_half_away
from .model import Instance, ItemShape, PackingState, Solution
from .push import PushConfig, push


class UtilityKind(enum.Enum):
    VALUE = "value"
    VALUE_PER_AREA = "value_per_area"
    VALUE15_PER_AREA = "value15_per_area"
    ELONGATION_WEIGHTED = "elongation_weighted"


class PushStrategy(enum.Enum):
    FIXED_RANDOM = 1
    DIAMETER_NORMAL_RANDOM_SIDE = 2
    DIAMETER_SKINNY_LEFT_FAT_RIGHT = 3
    DIAMETER_PLUS_LONGEST_EDGE = 4


@dataclass
class GreedyConfig:
    n_grid_points: int = 1000
    random_tries_per_point: int = 5
    utility: UtilityKind = UtilityKind.VALUE_PER_AREA
    push_strategy: PushStrategy = PushStrategy.DIAMETER_SKINNY_LEFT_FAT_RIGHT
    jitter_radius: int | None = None  # default: twice the lattice pitch
    seed: int = 0
    push: PushConfig = field(default_factory=PushConfig)

    def __post_init__(self):
        if self.n_grid_points < 1:
            raise ValueError("n_grid_points must be >= 1")
        if self.random_tries_per_point < 0:
            raise ValueError("random_tries_per_point must be >= 0")


# -- position list ---------------------------------------------------------


def _row_span(container: Sequence[Point], y: int) -> tuple[Fraction, Fraction] | None:
    xs: list[Fraction] = []
    n = len(container)
    for i in range(n):
        x1, y1 = container[i]
        x2, y2 = container[(i + 1) % n]
        if y1 == y2:
            if y1 == y:
                xs += [Fraction(x1), Fraction(x2)]
            continue
        if min(y1, y2) <= y <= max(y1, y2):
            xs.append(x1 + Fraction((y - y1) * (x2 - x1), y2 - y1))
    if not xs:
        return None
    return min(xs), max(xs)


def _lattice(container: Sequence[Point], pitch: int) -> list[Point]:
    xs = [p[0] for p in container]
    ys = [p[1] for p in container]
    minx, maxx, miny, maxy = min(xs), max(xs), min(ys), max(ys)
    x0 = minx + ((maxx - minx) % pitch) // 2
    y0 = miny + ((maxy - miny) % pitch) // 2
    pts = []
    y = y0
    while y <= maxy:
        span = _row_span(container, y)
        if span is not None:
            lo, hi = span
            k0 = math.ceil((lo - x0) / pitch)
            k1 = math.floor((hi - x0) / pitch)
            pts.extend((x0 + k * pitch, y) for k in range(k0, k1 + 1))
        y += pitch
    return pts


def _lattice_count(container: Sequence[Point], pitch: int) -> int:
    xs = [p[0] for p in container]
    ys = [p[1] for p in container]
    minx, maxx, miny, maxy = min(xs), max(xs), min(ys), max(ys)
    x0 = minx + ((maxx - minx) % pitch) // 2
    y0 = miny + ((maxy - miny) % pitch) // 2
    total = 0
    y = y0
    while y <= maxy:
        span = _row_span(container, y)
        if span is not None:
            lo, hi = span
            total += max(0, math.floor((hi - x0) / pitch) - math.ceil((lo - x0) / pitch) + 1)
        y += pitch
    return total


def lattice_pitch(container: Sequence[Point], n: int) -> int:
    """Integer pitch whose lattice count inside the container is closest to n."""
    area2 = doubled_signed_area(container)
    if area2 <= 0:
        raise GeometryError("degenerate container")
    xs = [p[0] for p in container]
    ys = [p[1] for p in container]
    extent = max(max(xs) - min(xs), max(ys) - min(ys))
    h0 = math.sqrt(area2 / 2 / n)
    cands = set(range(max(1, int(h0 / 1.5)), int(h0 * 1.5) + 3))
    if n <= 4:
        cands.add(extent + 1)
    best = None
    for h in sorted(cands):
        c = _lattice_count(container, h)
        key = (abs(c - n), h)
        if best is None or key < best[0]:
            best = (key, h)
    return best[1]


def build_positions(container: Sequence[Point], n: int, rng: random.Random) -> tuple[list[Point], int]:
    """Shuffled lattice with its rounded mean moved to the front, and the pitch used."""
    if n < 1:
        raise ValueError("n must be >= 1")
    pitch = lattice_pitch(container, n)
    pts = _lattice(container, pitch)
    if not pts:
        raise GeometryError("no lattice point inside the container")
    rng.shuffle(pts)
    cx = round_half_away(Fraction(sum(p[0] for p in pts), len(pts)))
    cy = round_half_away(Fraction(sum(p[1] for p in pts), len(pts)))
    c = (cx, cy)
    if c in pts:
        pts.remove(c)
    pts.insert(0, c)
    return pts, pitch


def build_position_list(container: Sequence[Point], n: int, rng: random.Random) -> list[Point]:
    return build_positions(container, n, rng)[0]


# -- utilities and push directions ------------------------------------------


def utility_of(value: float, metrics: ShapeMetrics, kind: UtilityKind) -> float:
    area = metrics.doubled_area / 2
    if kind is UtilityKind.VALUE:
        return float(value)
    if kind is UtilityKind.VALUE_PER_AREA:
        return value / area
    if kind is UtilityKind.VALUE15_PER_AREA:
        return value**1.5 / area
    if kind is UtilityKind.ELONGATION_WEIGHTED:
        return (1 + float(metrics.elongation)) * value / area
    raise ValueError(kind)


def utility(item: ItemShape, kind: UtilityKind) -> float:
    return utility_of(item.value, item.metrics, kind)


def normals(a: Point, b: Point) -> tuple[Point, Point]:
    """(left, right) normals of the vector a->b.

    Left has negative x (negative y on a tie), right is its opposite.
    """
    dx, dy = b[0] - a[0], b[1] - a[1]
    n1 = (-dy, dx)
    n2 = (dy, -dx)
    if n1[0] < 0 or (n1[0] == 0 and n1[1] < 0):
        return n1, n2
    return n2, n1


def diameter_normal_down(metrics: ShapeMetrics) -> Point:
    """Normal to the diameter pointing to negative y (ties: negative x)."""
    left, right = normals(*metrics.diameter_endpoints)
    for n in (left, right):
        if n[1] < 0 or (n[1] == 0 and n[0] < 0):
            return n
    return left


def random_direction(rng: random.Random, scale: int = 1024) -> Point:
    while True:
        t = rng.uniform(0, 2 * math.pi)
        u = (round(scale * math.cos(t)), round(scale * math.sin(t)))
        if u != (0, 0):
            return u


def choose_push_direction(
    metrics: ShapeMetrics,
    strategy: PushStrategy,
    rng: random.Random,
    fixed: Point | None = None,
) -> Point:
    if strategy is PushStrategy.FIXED_RANDOM:
        return fixed if fixed is not None else random_direction(rng)
    left, right = normals(*metrics.diameter_endpoints)
    if strategy is PushStrategy.DIAMETER_NORMAL_RANDOM_SIDE:
        return left if rng.random() < 0.5 else right
    if strategy is PushStrategy.DIAMETER_SKINNY_LEFT_FAT_RIGHT:
        return left if metrics.is_skinny else right
    if strategy is PushStrategy.DIAMETER_PLUS_LONGEST_EDGE:
        if metrics.is_skinny:
            return left
        return normals(*metrics.longest_edge)[1]
    raise ValueError(strategy)


# -- packable units ---------------------------------------------------------


@dataclass
class Unit:
    """A rigid group of item copies packed atomically (a lone item is a 1-unit)."""

    members: tuple[tuple[int, Point], ...]
    utility: float
    centroid: Point
    metrics: ShapeMetrics
    need: Counter = field(init=False)

    def __post_init__(self):
        self.need = Counter(i for i, _ in self.members)

    def available(self, remaining: Sequence[int]) -> bool:
        return all(remaining[i] >= c for i, c in self.need.items())


def item_units(instance: Instance, kind: UtilityKind) -> list[Unit]:
    units = [
        Unit(((it.index, (0, 0)),), utility(it, kind), it.centroid, it.metrics)
        for it in instance.items
    ]
    # stable: equal utilities keep input order
    return sorted(units, key=lambda u: -u.utility)


def _unit_fits(state: PackingState, unit: Unit, ref: Point) -> bool:
    for i, (ox, oy) in unit.members:
        if not state.fits(i, (ref[0] + ox, ref[1] + oy)):
            return False
    return True


def place_unit(state: PackingState, unit: Unit, ref: Point) -> list[int]:
    return [state.place(i, (ref[0] + ox, ref[1] + oy)) for i, (ox, oy) in unit.members]


class Packer:
    """Inner loop shared by the greedy constructor and the fill routine."""

    def __init__(
        self,
        state: PackingState,
        positions: Sequence[Point],
        pitch: int,
        cfg: GreedyConfig,
        rng: random.Random,
    ):
        self.state = state
        self.positions = list(positions)
        self.cfg = cfg
        self.rng = rng
        self.jitter = cfg.jitter_radius if cfg.jitter_radius is not None else 2 * pitch
        self.fixed_u = random_direction(rng) if cfg.push_strategy is PushStrategy.FIXED_RANDOM else None
        self.log: list[tuple[int, bool]] = []  # (unit index, placed)

    def probes(self, g: Point) -> Iterable[Point]:
        yield g
        r = self.jitter
        rand = self.rng.randint
        for _ in range(self.cfg.random_tries_per_point):
            yield g[0] + rand(-r, r), g[1] + rand(-r, r)

    def find_spot(self, unit: Unit, positions: Iterable[Point] | None = None) -> Point | None:
        cx, cy = unit.centroid
        for g in self.positions if positions is None else positions:
            for px, py in self.probes(g):
                ref = (px - cx, py - cy)
                if _unit_fits(self.state, unit, ref):
                    return ref
        return None

    def try_unit(self, unit: Unit, positions: Iterable[Point] | None = None) -> list[int] | None:
        if not unit.available(self.state.remaining):
            return None
        ref = self.find_spot(unit, positions)
        if ref is None:
            return None
        ids = place_unit(self.state, unit, ref)
        u = choose_push_direction(unit.metrics, self.cfg.push_strategy, self.rng, self.fixed_u)
        push(self.state, ids, u, self.cfg.push)
        return ids

    def pack(self, units: Sequence[Unit]) -> int:
        """Place copies of each unit in order until one fails; returns value gained."""
        before = self.state.total_value
        for k, unit in enumerate(units):
            while unit.available(self.state.remaining):
                ids = self.try_unit(unit)
                self.log.append((k, ids is not None))
                if ids is None:
                    # the packing only grows, so later copies would fail too
                    break
        return self.state.total_value - before


def greedy_state(
    instance: Instance,
    cfg: GreedyConfig,
    units: Sequence[Unit] | None = None,
) -> tuple[PackingState, list[Point], int]:
    rng = random.Random(cfg.seed)
    positions, pitch = build_positions(instance.container, cfg.n_grid_points, rng)
    state = PackingState(instance)
    packer = Packer(state, positions, pitch, cfg, rng)
    packer.pack(units if units is not None else item_units(instance, cfg.utility))
    return state, positions, pitch


def greedy_pack(instance: Instance, cfg: GreedyConfig, units: Sequence[Unit] | None = None) -> Solution:
    return greedy_state(instance, cfg, units)[0].solution()
