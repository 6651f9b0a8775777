"""Instances, solutions, the mutable packing state and the feasibility verifier."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .geometry import (
    COORD_LIMIT,
    GeometryError,
    Point,
    ShapeMetrics,
    bounding_box,
    convex_hull,
    doubled_signed_area,
    is_convex,
    is_simple,
    remove_collinear,
    shape_metrics,
)
from .grid import Grid, grid_new
from .overlap import ChainSet, decompose_chains, inside_container, items_overlap


class InstanceError(ValueError):
    """Raised when an instance fails validation."""


def _check_coords(points: Iterable[Point], what: str) -> None:
    for x, y in points:
        if abs(x) > COORD_LIMIT or abs(y) > COORD_LIMIT:
            raise InstanceError(f"{what}: coordinate ({x}, {y}) exceeds 2^40")


def normalize_polygon(points: Sequence[Point], what: str) -> tuple[Point, ...]:
    """Validate a simple polygon and return it counterclockwise."""
    pts = [(int(x), int(y)) for x, y in points]
    if len(pts) < 3:
        raise InstanceError(f"{what}: fewer than 3 vertices")
    _check_coords(pts, what)
    for i in range(len(pts)):
        if pts[i] == pts[i - 1]:
            raise InstanceError(f"{what}: repeated consecutive vertex {pts[i]}")
    a2 = doubled_signed_area(pts)
    if a2 == 0:
        raise InstanceError(f"{what}: zero area")
    if a2 < 0:
        pts.reverse()
    if not is_simple(pts):
        raise InstanceError(f"{what}: polygon is not simple")
    return tuple(pts)


class ItemShape:
    """A valued polygon with the caches every solver needs."""

    def __init__(self, vertices: Sequence[Point], value: int, quantity: int, index: int = 0):
        self.index = index
        self.vertices = tuple(vertices)
        self.value = int(value)
        self.quantity = int(quantity)
        self.chains: ChainSet = decompose_chains(self.vertices)
        self.box = self.chains.box

    @cached_property
    def metrics(self) -> ShapeMetrics:
        return shape_metrics(self.vertices)

    @cached_property
    def hull(self) -> tuple[Point, ...]:
        return tuple(convex_hull(self.vertices))

    @property
    def doubled_area(self) -> int:
        return self.metrics.doubled_area

    @property
    def area(self) -> float:
        return self.metrics.doubled_area / 2

    @property
    def centroid(self) -> Point:
        return self.metrics.centroid

    def __repr__(self) -> str:
        return f"ItemShape(#{self.index}, n={len(self.vertices)}, value={self.value}, q={self.quantity})"


class Instance:
    def __init__(self, name: str, container: Sequence[Point], items: Sequence[ItemShape]):
        self.name = name
        self.container = tuple(container)
        self.items = list(items)
        for i, it in enumerate(self.items):
            it.index = i
        self.box = bounding_box(self.container)
        self._bounds = [self._support_bounds(it) for it in self.items]

    @classmethod
    def build(cls, name: str, container: Sequence[Point], items: Iterable[tuple[Sequence[Point], int, int]]) -> "Instance":
        cont = normalize_polygon(container, "container")
        cont = tuple(remove_collinear(cont))
        if not is_convex(cont):
            raise InstanceError("container: polygon is not convex")
        shapes = []
        for i, (pts, value, qty) in enumerate(items):
            if int(qty) < 1:
                raise InstanceError(f"item {i}: quantity must be >= 1")
            if int(value) < 0:
                raise InstanceError(f"item {i}: value must be non-negative")
            shapes.append(ItemShape(normalize_polygon(pts, f"item {i}"), value, qty, i))
        return cls(name, cont, shapes)

    def _support_bounds(self, it: ItemShape) -> tuple[tuple[int, int, int], ...]:
        # inside iff nx*tx + ny*ty <= bound for every container edge
        out = []
        c = self.container
        n = len(c)
        for i in range(n):
            ax, ay = c[i]
            bx, by = c[(i + 1) % n]
            ex, ey = bx - ax, by - ay
            bound = min(ex * (vy - ay) - ey * (vx - ax) for vx, vy in it.vertices)
            out.append((ey, -ex, bound))
        return tuple(out)

    def fits_container(self, item_index: int, pos: Point) -> bool:
        tx, ty = pos
        it = self.items[item_index]
        bminx, bminy, bmaxx, bmaxy = it.box
        cminx, cminy, cmaxx, cmaxy = self.box
        if bminx + tx < cminx or bmaxx + tx > cmaxx or bminy + ty < cminy or bmaxy + ty > cmaxy:
            return False
        for nx, ny, bound in self._bounds[item_index]:
            if nx * tx + ny * ty > bound:
                return False
        return True

    def translation_range(self, item_index: int) -> tuple[int, int, int, int]:
        """Translations that keep the item's box inside the container box."""
        bminx, bminy, bmaxx, bmaxy = self.items[item_index].box
        cminx, cminy, cmaxx, cmaxy = self.box
        return cminx - bminx, cminy - bminy, cmaxx - bmaxx, cmaxy - bmaxy

    @property
    def total_copies(self) -> int:
        return sum(it.quantity for it in self.items)

    def __repr__(self) -> str:
        return f"Instance({self.name!r}, {len(self.items)} items, {self.total_copies} copies)"


@dataclass(frozen=True)
class Placement:
    item_index: int
    translation: Point


@dataclass(frozen=True)
class Solution:
    instance_name: str
    placements: tuple[Placement, ...] = ()

    def value(self, instance: Instance) -> int:
        return sum(instance.items[p.item_index].value for p in self.placements)

    def __len__(self) -> int:
        return len(self.placements)


class PackingState:
    """Mutable packing with a spatial grid, per-item remaining counts and running value."""

    def __init__(self, instance: Instance, grid: Grid | None = None):
        self.instance = instance
        self.items = instance.items
        self.grid = grid or grid_new(instance.box, [it.box for it in instance.items])
        self.placements: dict[int, tuple[int, Point]] = {}
        self.remaining = [it.quantity for it in instance.items]
        self.total_value = 0
        self._next_id = 0
        self.checks = 0

    @classmethod
    def from_solution(cls, instance: Instance, solution: Solution) -> "PackingState":
        st = cls(instance)
        for p in solution.placements:
            st.place(p.item_index, p.translation)
        return st

    def _box(self, item_index: int, pos: Point) -> tuple[int, int, int, int]:
        b = self.items[item_index].box
        return b[0] + pos[0], b[1] + pos[1], b[2] + pos[0], b[3] + pos[1]

    def fits(self, item_index: int, pos: Point, exclude: Iterable[int] = ()) -> bool:
        """Geometric validity only: inside the container, no overlap with others."""
        self.checks += 1
        if not self.instance.fits_container(item_index, pos):
            return False
        chains = self.items[item_index].chains
        placements = self.placements
        items = self.items
        for pid in self.grid.candidates(self._box(item_index, pos)):
            if pid in exclude:
                continue
            j, q = placements[pid]
            if items_overlap(chains, pos, items[j].chains, q):
                return False
        return True

    def can_place(self, item_index: int, pos: Point) -> bool:
        return self.remaining[item_index] > 0 and self.fits(item_index, pos)

    def overlapping(self, item_index: int, pos: Point) -> list[int]:
        chains = self.items[item_index].chains
        out = []
        for pid in self.grid.candidates(self._box(item_index, pos)):
            j, q = self.placements[pid]
            if items_overlap(chains, pos, self.items[j].chains, q):
                out.append(pid)
        return sorted(out)

    def place(self, item_index: int, pos: Point) -> int:
        assert self.remaining[item_index] > 0, "quantity exhausted"
        pos = (int(pos[0]), int(pos[1]))
        pid = self._next_id
        self._next_id += 1
        self.placements[pid] = (item_index, pos)
        self.grid.insert(pid, self._box(item_index, pos))
        self.remaining[item_index] -= 1
        self.total_value += self.items[item_index].value
        return pid

    def unplace(self, pid: int) -> None:
        item_index, pos = self.placements.pop(pid)
        self.grid.remove(pid, self._box(item_index, pos))
        self.remaining[item_index] += 1
        self.total_value -= self.items[item_index].value

    def move(self, pid: int, pos: Point) -> None:
        item_index, old = self.placements[pid]
        self.grid.remove(pid, self._box(item_index, old))
        self.placements[pid] = (item_index, pos)
        self.grid.insert(pid, self._box(item_index, pos))

    def position(self, pid: int) -> Point:
        return self.placements[pid][1]

    def placed_centroid(self, pid: int) -> Point:
        i, (tx, ty) = self.placements[pid]
        cx, cy = self.items[i].centroid
        return cx + tx, cy + ty

    def solution(self) -> Solution:
        return Solution(
            self.instance.name,
            tuple(Placement(i, pos) for _, (i, pos) in sorted(self.placements.items())),
        )

    def restore(self, solution: Solution) -> None:
        """Reset the state to exactly the placements of ``solution``."""
        for pid in list(self.placements):
            self.unplace(pid)
        for p in solution.placements:
            self.place(p.item_index, p.translation)

    def __len__(self) -> int:
        return len(self.placements)


@dataclass
class VerifyReport:
    feasible: bool
    total_value: int
    violations: list[dict] = field(default_factory=list)

    def summary(self) -> str:
        head = f"feasible={self.feasible} value={self.total_value} violations={len(self.violations)}"
        lines = [head]
        for v in self.violations:
            lines.append("  " + ", ".join(f"{k}={v[k]}" for k in v))
        return "\n".join(lines)


def verify(instance: Instance, solution: Solution) -> VerifyReport:
    """Re-derive containment, pairwise disjointness and quantity bounds from scratch."""
    violations: list[dict] = []
    if solution.instance_name != instance.name:
        violations.append({"kind": "instance_name", "expected": instance.name, "got": solution.instance_name})
    counts = [0] * len(instance.items)
    valid: list[tuple[int, int, Point]] = []
    for k, p in enumerate(solution.placements):
        i = p.item_index
        if not isinstance(i, int) or not 0 <= i < len(instance.items):
            violations.append({"kind": "item_index", "placement": k, "item_index": i})
            continue
        t = p.translation
        if not (isinstance(t[0], int) and isinstance(t[1], int)):
            violations.append({"kind": "non_integer", "placement": k})
            continue
        counts[i] += 1
        if not inside_container(instance.items[i].chains, t, instance.container):
            violations.append({"kind": "outside", "placement": k, "item_index": i})
        valid.append((k, i, t))
    for i, c in enumerate(counts):
        if c > instance.items[i].quantity:
            violations.append({"kind": "quantity", "item_index": i, "count": c, "quantity": instance.items[i].quantity})

    # sort-and-sweep over x on translated boxes
    boxes = []
    for k, i, t in valid:
        b = instance.items[i].box
        boxes.append((b[0] + t[0], b[2] + t[0], b[1] + t[1], b[3] + t[1], k, i, t))
    boxes.sort()
    active: list[tuple] = []
    for entry in boxes:
        x0, x1, y0, y1, k, i, t = entry
        active = [e for e in active if e[1] > x0]
        for e in active:
            if e[2] < y1 and y0 < e[3]:
                if items_overlap(instance.items[e[5]].chains, e[6], instance.items[i].chains, t):
                    a, b = sorted((e[4], k))
                    violations.append({"kind": "overlap", "placements": [a, b]})
        active.append(entry)

    value = sum(instance.items[i].value for _, i, _ in valid)
    return VerifyReport(not violations, value, violations)


def value_ratio(solution_value: int, best_value: int) -> float:
    if best_value <= 0:
        raise ValueError("best_value must be positive")
    return solution_value / best_value


def competition_score(solution_value: int, best_value: int) -> float:
    return value_ratio(solution_value, best_value) ** 2


__all__ = [
    "GeometryError",
    "Instance",
    "InstanceError",
    "ItemShape",
    "PackingState",
    "Placement",
    "Solution",
    "VerifyReport",
    "competition_score",
    "normalize_polygon",
    "value_ratio",
    "verify",
]
