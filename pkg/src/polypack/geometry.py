"""Exact integer geometry: orientation, areas, hulls and per-shape metrics.

Points are plain ``(x, y)`` tuples of Python ints. Every predicate here is
evaluated exactly; Python integers never overflow, and the coordinate cap
``COORD_LIMIT`` keeps intermediates inside a 128-bit envelope anyway.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

Point = Tuple[int, int]

COORD_LIMIT = 2**40


class GeometryError(ValueError):
    """Raised for degenerate or invalid polygon input."""


def cross(o: Point, a: Point, b: Point) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def orient(a: Point, b: Point, c: Point) -> int:
    """Sign of the turn a -> b -> c: 1 left, -1 right, 0 collinear."""
    v = cross(a, b, c)
    return (v > 0) - (v < 0)


def round_half_away(q: Fraction) -> int:
    n, d = q.numerator, q.denominator  # d > 0
    if n >= 0:
        return (2 * n + d) // (2 * d)
    return -((-2 * n + d) // (2 * d))


def round_half_away_float(x: float) -> int:
    if x >= 0:
        return int(x + 0.5)
    return -int(-x + 0.5)


def doubled_signed_area(poly: Sequence[Point]) -> int:
    s = 0
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return s


def bounding_box(points: Sequence[Point]) -> Tuple[int, int, int, int]:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return min(xs), min(ys), max(xs), max(ys)


def centroid(poly: Sequence[Point]) -> Point:
    """Area-weighted centroid, each coordinate rounded half away from zero."""
    a2 = doubled_signed_area(poly)
    if a2 == 0:
        raise GeometryError("centroid of a zero-area polygon")
    cx = cy = 0
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        c = x1 * y2 - x2 * y1
        cx += (x1 + x2) * c
        cy += (y1 + y2) * c
    return round_half_away(Fraction(cx, 3 * a2)), round_half_away(Fraction(cy, 3 * a2))


def _half_hull(pts: Sequence[Point]) -> list[Point]:
    h: list[Point] = []
    for p in pts:
        px, py = p
        while len(h) >= 2:
            (ax, ay), (bx, by) = h[-2], h[-1]
            if (bx - ax) * (py - ay) - (by - ay) * (px - ax) > 0:
                break
            h.pop()
        h.append(p)
    return h


def convex_hull(points: Sequence[Point]) -> list[Point]:
    """Counterclockwise hull with collinear boundary points removed (monotone chain)."""
    pts = sorted(set(points))
    if len(pts) < 3:
        raise GeometryError("convex hull needs at least 3 distinct points")
    lower = _half_hull(pts)
    upper = _half_hull(pts[::-1])
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise GeometryError("all points are collinear")
    return hull


def is_convex(poly: Sequence[Point]) -> bool:
    """True for a counterclockwise polygon without reflex vertices."""
    n = len(poly)
    if n < 3 or doubled_signed_area(poly) <= 0:
        return False
    for i in range(n):
        if cross(poly[i - 1], poly[i], poly[(i + 1) % n]) < 0:
            return False
    return True


def _segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool:
    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True

    def on_seg(a: Point, b: Point, c: Point) -> bool:
        return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    return (
        (d1 == 0 and on_seg(q1, q2, p1))
        or (d2 == 0 and on_seg(q1, q2, p2))
        or (d3 == 0 and on_seg(p1, p2, q1))
        or (d4 == 0 and on_seg(p1, p2, q2))
    )


def is_simple(poly: Sequence[Point]) -> bool:
    """Quadratic simplicity check: distinct vertices, only consecutive edges meet."""
    n = len(poly)
    if n < 3 or len(set(poly)) != n:
        return False
    for i in range(n):
        a, b, c = poly[i], poly[(i + 1) % n], poly[(i + 2) % n]
        # consecutive edges may only share their common vertex
        if orient(a, b, c) == 0 and (c[0] - b[0]) * (a[0] - b[0]) + (c[1] - b[1]) * (a[1] - b[1]) > 0:
            return False
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            if _segments_intersect(a, b, poly[j], poly[(j + 1) % n]):
                return False
    return True


def remove_collinear(poly: Sequence[Point]) -> list[Point]:
    out = list(poly)
    changed = True
    while changed and len(out) > 3:
        changed = False
        for i in range(len(out)):
            if cross(out[i - 1], out[i], out[(i + 1) % len(out)]) == 0:
                del out[i]
                changed = True
                break
    return out


def diameter(poly: Sequence[Point]) -> tuple[Point, Point]:
    """Vertex pair at maximum squared distance.

    Only strictly convex hull vertices can be endpoints, so the all-pairs scan
    runs over those; ties go to the lexicographically smallest index pair.
    """
    if len(poly) < 2:
        raise GeometryError("diameter needs two vertices")
    try:
        hull = set(convex_hull(poly))
        idx = [i for i, p in enumerate(poly) if p in hull]
    except GeometryError:
        idx = list(range(len(poly)))
    best = -1
    pair = (0, 0)
    for a in range(len(idx)):
        i = idx[a]
        xi, yi = poly[i]
        for b in range(a + 1, len(idx)):
            j = idx[b]
            d = (poly[j][0] - xi) ** 2 + (poly[j][1] - yi) ** 2
            if d > best:
                best = d
                pair = (i, j)
    return poly[pair[0]], poly[pair[1]]


def width_normal_to(poly: Sequence[Point], p: Point, q: Point) -> tuple[int, int]:
    """Projection span normal to p->q as ``(span, |pq|^2)``.

    The true width is ``span / sqrt(|pq|^2)``; keeping both integers lets callers
    compare ratios without roots.
    """
    dx, dy = q[0] - p[0], q[1] - p[1]
    d2 = dx * dx + dy * dy
    if d2 == 0:
        raise GeometryError("direction endpoints coincide")
    proj = [dx * (v[1] - p[1]) - dy * (v[0] - p[0]) for v in poly]
    span = max(proj) - min(proj)
    if span == 0:
        raise GeometryError("all vertices are collinear")
    return span, d2


def width_normal_to_diameter(poly: Sequence[Point]) -> Fraction:
    """Squared width normal to the diameter, as an exact rational."""
    a, b = diameter(poly)
    span, d2 = width_normal_to(poly, a, b)
    return Fraction(span * span, d2)


def longest_edge(poly: Sequence[Point]) -> tuple[Point, Point]:
    best = -1
    edge = (poly[0], poly[1 % len(poly)])
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        d = (b[0] - a[0]) ** 2 + (b[1] - a[1]) ** 2
        if d > best:
            best = d
            edge = (a, b)
    return edge


@dataclass(frozen=True)
class ShapeMetrics:
    doubled_area: int
    centroid: Point
    diameter_endpoints: tuple[Point, Point]
    # width = width_span / sqrt(diameter_sq)
    width_span: int
    diameter_sq: int
    longest_edge: tuple[Point, Point]
    skinny_ratio: int = 3

    @property
    def elongation(self) -> Fraction:
        """Diameter length over width; equals ``diameter_sq / width_span``."""
        return Fraction(self.diameter_sq, self.width_span)

    @property
    def thickness(self) -> Fraction:
        """Width over diameter length, the inverse of :attr:`elongation`."""
        return Fraction(self.width_span, self.diameter_sq)

    @property
    def is_skinny(self) -> bool:
        return self.diameter_sq > self.skinny_ratio * self.width_span


def shape_metrics(poly: Sequence[Point], skinny_ratio: int = 3) -> ShapeMetrics:
    a2 = doubled_signed_area(poly)
    if a2 <= 0:
        raise GeometryError("polygon must be counterclockwise with positive area")
    d = diameter(poly)
    span, d2 = width_normal_to(poly, d[0], d[1])
    return ShapeMetrics(
        doubled_area=a2,
        centroid=centroid(poly),
        diameter_endpoints=d,
        width_span=span,
        diameter_sq=d2,
        longest_edge=longest_edge(poly),
        skinny_ratio=skinny_ratio,
    )


def point_in_polygon(pt: Point, poly: Sequence[Point]) -> int:
    """1 strictly inside, 0 on the boundary, -1 outside (exact crossing number)."""
    x, y = pt
    inside = False
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        c = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
        if c == 0 and min(x1, x2) <= x <= max(x1, x2) and min(y1, y2) <= y <= max(y1, y2):
            return 0
        if (y1 > y) != (y2 > y):
            # Edge straddles the horizontal line; crossing is right of pt iff
            # the sign of c matches the edge's vertical direction.
            if (c > 0) == (y2 > y1):
                inside = not inside
    return 1 if inside else -1


def translate(poly: Sequence[Point], t: Point) -> list[Point]:
    tx, ty = t
    return [(x + tx, y + ty) for x, y in poly]
