"""Synthetic instances: exact square tilings, convex jigsaw-like sets, polyomino sets."""
from __future__ import annotations

import math
import random
from typing import Sequence

from .geometry import GeometryError, Point, convex_hull, doubled_signed_area, is_simple, remove_collinear
from .model import Instance

VALUE_MODES = ("unit", "random", "area")


def _value(mode: str, doubled_area: int, unit_area2: int, rng: random.Random) -> int:
    if mode == "unit":
        return 1
    if mode == "random":
        return rng.randint(1, 10)
    if mode == "area":
        # roughly proportional to area, with mild noise
        base = doubled_area / unit_area2
        return max(1, round(base * rng.uniform(0.8, 1.2)))
    raise ValueError(f"unknown value mode {mode!r}")


def tiling(k: int, side: int = 20, values: str = "unit", seed: int = 0) -> Instance:
    """k^2 copies of a side x side square that exactly tile a (k*side)^2 container."""
    if k < 1 or side < 1:
        raise ValueError("k and side must be >= 1")
    rng = random.Random(seed)
    L = k * side
    sq = [(0, 0), (side, 0), (side, side), (0, side)]
    v = _value(values, 2 * side * side, 2 * side * side, rng)
    return Instance.build(f"tiling_{k}x{k}_{side}", [(0, 0), (L, 0), (L, L), (0, L)], [(sq, v, k * k)])


def _random_convex_polygon(rng: random.Random, n: int, radius: float) -> list[Point]:
    while True:
        pts = []
        for _ in range(n):
            a = rng.uniform(0, 2 * math.pi)
            r = radius * math.sqrt(rng.uniform(0.3, 1.0))
            pts.append((round(r * math.cos(a)), round(r * math.sin(a))))
        try:
            return convex_hull(pts)
        except GeometryError:
            continue


def convex(
    n_items: int,
    size: int = 1000,
    values: str = "random",
    seed: int = 0,
    max_quantity: int = 3,
) -> Instance:
    """Random convex items in a random convex container."""
    if n_items < 1 or size < 10:
        raise ValueError("need n_items >= 1 and size >= 10")
    rng = random.Random(seed)
    cont = _random_convex_polygon(rng, rng.randint(6, 12), size / 2)
    cont = [(x + size, y + size) for x, y in cont]
    area2 = doubled_signed_area(cont)
    # typical item so that the total copies roughly overfill the container
    copies = 0
    specs = []
    for _ in range(n_items):
        q = rng.randint(1, max_quantity)
        copies += q
        specs.append(q)
    r = math.sqrt(area2 / 2 / max(copies, 1) / math.pi) * 2.2
    items = []
    for q in specs:
        shape = _random_convex_polygon(rng, rng.randint(3, 9), max(3.0, r * rng.uniform(0.5, 1.5)))
        a2 = doubled_signed_area(shape)
        items.append((shape, _value(values, a2, max(1, round(2 * math.pi * r * r)), rng), q))
    return Instance.build(f"convex_{n_items}_s{seed}", cont, items)


def random_polyomino_cells(rng: random.Random, n_cells: int) -> list[tuple[int, int]]:
    """Random connected cell set whose outline is a simple hole-free polygon."""
    if n_cells < 1:
        raise ValueError("n_cells must be >= 1")
    while True:
        cells = {(0, 0)}
        while len(cells) < n_cells:
            cx, cy = rng.choice(sorted(cells))
            dx, dy = rng.choice(((1, 0), (-1, 0), (0, 1), (0, -1)))
            cells.add((cx + dx, cy + dy))
        try:
            polyomino_polygon(sorted(cells), 1)
        except GeometryError:
            continue
        return sorted(cells)


def polyomino_polygon(cells: Sequence[tuple[int, int]], unit: int) -> list[Point]:
    """Outline of a union of unit cells, counterclockwise, scaled by ``unit``.

    Raises GeometryError when the outline is not a single simple loop (holes or
    cells meeting at a corner only).
    """
    cs = set(cells)
    nxt: dict[Point, Point] = {}
    for x, y in cs:
        # CCW edges of each cell that have no neighbour across them
        for (a, b), nb in (
            (((x, y), (x + 1, y)), (x, y - 1)),
            (((x + 1, y), (x + 1, y + 1)), (x + 1, y)),
            (((x + 1, y + 1), (x, y + 1)), (x, y + 1)),
            (((x, y + 1), (x, y)), (x - 1, y)),
        ):
            if nb not in cs:
                if a in nxt:
                    raise GeometryError("outline touches itself")
                nxt[a] = b
    start = min(nxt)
    loop = [start]
    p = nxt[start]
    while p != start:
        loop.append(p)
        p = nxt[p]
    if len(loop) != len(nxt):
        raise GeometryError("outline has holes")
    poly = remove_collinear(loop)
    poly = [(x * unit, y * unit) for x, y in poly]
    if not is_simple(poly):
        raise GeometryError("outline not simple")
    return poly


def polyomino(
    n_items: int,
    unit: int = 10,
    max_cells: int = 8,
    values: str = "area",
    seed: int = 0,
    max_quantity: int = 3,
) -> Instance:
    """Random polyominoes of at most ``max_cells`` cells in a rectangular container."""
    if n_items < 1 or unit < 1 or max_cells < 1:
        raise ValueError("n_items, unit and max_cells must be >= 1")
    rng = random.Random(seed)
    items = []
    cells_total = 0
    for _ in range(n_items):
        cells = random_polyomino_cells(rng, rng.randint(1, max_cells))
        q = rng.randint(1, max_quantity)
        cells_total += q * len(cells)
        poly = polyomino_polygon(cells, unit)
        items.append((poly, _value(values, doubled_signed_area(poly), 2 * unit * unit, rng), q))
    # container holds about 60% of the offered cells
    side = max(max_cells + 1, math.ceil(math.sqrt(0.6 * cells_total)))
    w = side * unit
    h = max(max_cells + 1, math.ceil(0.6 * cells_total / side)) * unit
    return Instance.build(f"polyomino_{n_items}_s{seed}", [(0, 0), (w, 0), (w, h), (0, h)], items)


def generate(kind: str, n: int, values: str | None = None, seed: int = 0) -> Instance:
    """Dispatch by kind name; ``n`` is k for tilings and the item count otherwise."""
    if kind == "tiling":
        return tiling(n, values=values or "unit", seed=seed)
    if kind == "convex":
        return convex(n, values=values or "random", seed=seed)
    if kind == "polyomino":
        return polyomino(n, values=values or "area", seed=seed)
    raise ValueError(f"unknown instance kind {kind!r}")
