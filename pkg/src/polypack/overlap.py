"""Exact overlap tests between translated items.

Each polygon boundary is cut into lexicographically monotone chains (x first,
then y, so vertical edges continue whichever chain they extend). Two items
overlap iff their open interiors intersect; boundaries may touch freely.

The test walks chain pairs whose boxes meet and merges their segments over x.
A proper crossing, or a collinear overlap where both interiors lie on the same
side, proves overlap immediately. Every other boundary contact happens at a
vertex of one item; at those points the incident edge directions of one item
are checked against the open local wedge of the other. With no contact at all,
one item is either disjoint from the other or nested inside it, which a single
ray cast decides.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .geometry import GeometryError, Point, bounding_box, is_convex, point_in_polygon

Box = tuple[int, int, int, int]


@dataclass(frozen=True)
class Chain:
    """Lex-monotone boundary piece.

    ``points`` are in increasing (x, y) order, ``indices`` the matching polygon
    vertex indices. ``item_above`` is True when the boundary runs in chain order
    (counterclockwise), which puts the interior on the left/upper side.
    """

    points: tuple[Point, ...]
    indices: tuple[int, ...]
    item_above: bool
    box: Box
    # (x1, y1, x2, y2, i1, i2) per segment, lex ordered
    segments: tuple[tuple[int, int, int, int, int, int], ...]


@dataclass(frozen=True)
class ChainSet:
    vertices: tuple[Point, ...]
    chains: tuple[Chain, ...]
    box: Box


def decompose_chains(poly: Sequence[Point]) -> ChainSet:
    verts = tuple((int(x), int(y)) for x, y in poly)
    n = len(verts)
    if n < 3:
        raise GeometryError("polygon needs at least 3 vertices")
    start = min(range(n), key=lambda i: verts[i])
    order = [(start + k) % n for k in range(n + 1)]
    runs: list[tuple[bool, list[int]]] = []
    for k in range(n):
        i, j = order[k], order[k + 1]
        up = verts[j] > verts[i]
        if runs and runs[-1][0] == up:
            runs[-1][1].append(j)
        else:
            runs.append((up, [i, j]))
    chains = []
    for up, idx in runs:
        if not up:
            idx = idx[::-1]
        pts = tuple(verts[i] for i in idx)
        segs = tuple(
            (pts[k][0], pts[k][1], pts[k + 1][0], pts[k + 1][1], idx[k], idx[k + 1])
            for k in range(len(pts) - 1)
        )
        chains.append(Chain(pts, tuple(idx), up, bounding_box(pts), segs))
    return ChainSet(verts, tuple(chains), bounding_box(verts))


def reconstruct_boundary(cs: ChainSet) -> list[Point]:
    """Counterclockwise vertex cycle rebuilt from the chains, starting at the lex-min vertex."""
    out: list[Point] = []
    for ch in cs.chains:
        pts = ch.points if ch.item_above else ch.points[::-1]
        out.extend(pts[:-1])
    return out


def _into(verts: tuple[Point, ...], kind: int, k: int, dx: int, dy: int) -> bool:
    """Does direction (dx, dy) point strictly into the polygon's interior?

    ``kind`` 0 means the base point is vertex ``k``; 1 means it lies inside edge
    ``k`` (from vertex k to k+1).
    """
    n = len(verts)
    if kind == 1:
        ax, ay = verts[k]
        bx, by = verts[(k + 1) % n]
        return (bx - ax) * dy - (by - ay) * dx > 0
    wx, wy = verts[k]
    px, py = verts[k - 1]
    nx, ny = verts[(k + 1) % n]
    e1x, e1y = nx - wx, ny - wy
    e2x, e2y = px - wx, py - wy
    c1 = e1x * dy - e1y * dx
    c2 = dx * e2y - dy * e2x
    turn = e1x * e2y - e1y * e2x
    if turn > 0:
        return c1 > 0 and c2 > 0
    if turn < 0:
        return c1 > 0 or c2 > 0
    return c1 > 0


def _directions(verts: tuple[Point, ...], kind: int, k: int) -> tuple[tuple[int, int], tuple[int, int]]:
    n = len(verts)
    wx, wy = verts[k]
    nx, ny = verts[(k + 1) % n]
    if kind == 1:
        return (nx - wx, ny - wy), (wx - nx, wy - ny)
    px, py = verts[k - 1]
    return (nx - wx, ny - wy), (px - wx, py - wy)


def _edge_of(n: int, i: int, j: int) -> int:
    return i if (i + 1) % n == j else j


def _contact_overlaps(av: tuple[Point, ...], akind: int, ak: int, bv: tuple[Point, ...], bkind: int, bk: int) -> bool:
    for dx, dy in _directions(bv, bkind, bk):
        if _into(av, akind, ak, dx, dy):
            return True
    for dx, dy in _directions(av, akind, ak):
        if _into(bv, bkind, bk, dx, dy):
            return True
    return False


def items_overlap(a: ChainSet, pos_a: Point, b: ChainSet, pos_b: Point) -> bool:
    """True iff the open interiors of the two translated items intersect."""
    dx = pos_b[0] - pos_a[0]
    dy = pos_b[1] - pos_a[1]
    aminx, aminy, amaxx, amaxy = a.box
    bminx, bminy, bmaxx, bmaxy = b.box
    if amaxx <= bminx + dx or bmaxx + dx <= aminx or amaxy <= bminy + dy or bmaxy + dy <= aminy:
        return False

    av = a.vertices
    bv = b.vertices
    na = len(av)
    nb = len(bv)
    # contact -> (a_kind, a_k, b_kind, b_k); kind 0 vertex, 1 edge interior
    contacts: set[tuple[int, int, int, int]] = set()

    for ca in a.chains:
        c0, c1_, c2_, c3 = ca.box
        for cb in b.chains:
            d0, d1, d2, d3 = cb.box
            if c2_ < d0 + dx or d2 + dx < c0 or c3 < d1 + dy or d3 + dy < c1_:
                continue
            sb = cb.segments
            nsb = len(sb)
            j0 = 0
            for px, py, qx, qy, ai, aj in ca.segments:
                while j0 < nsb and sb[j0][2] + dx < px:
                    j0 += 1
                j = j0
                ylo = py if py < qy else qy
                yhi = qy if py < qy else py
                while j < nsb:
                    rx, ry, sx, sy, bi, bj = sb[j]
                    rx += dx
                    if rx > qx:
                        break
                    j += 1
                    ry += dy
                    sx += dx
                    sy += dy
                    if (ry < ylo and sy < ylo) or (ry > yhi and sy > yhi):
                        continue
                    ux, uy = qx - px, qy - py
                    o1 = ux * (ry - py) - uy * (rx - px)
                    o2 = ux * (sy - py) - uy * (sx - px)
                    if (o1 > 0 and o2 > 0) or (o1 < 0 and o2 < 0):
                        continue
                    wx, wy = sx - rx, sy - ry
                    o3 = wx * (py - ry) - wy * (px - rx)
                    o4 = wx * (qy - ry) - wy * (qx - rx)
                    if (o3 > 0 and o4 > 0) or (o3 < 0 and o4 < 0):
                        continue
                    if o1 and o2 and o3 and o4:
                        return True
                    p = (px, py)
                    q = (qx, qy)
                    r = (rx, ry)
                    s = (sx, sy)
                    if o1 == 0 and o2 == 0:
                        lo = p if p > r else r
                        hi = q if q < s else s
                        if lo < hi:
                            # both boundaries run the same way along the
                            # shared piece: interiors on the same side
                            if ((ai + 1) % na == aj) == ((bi + 1) % nb == bj):
                                return True
                    ea = _edge_of(na, ai, aj)
                    eb = _edge_of(nb, bi, bj)
                    if o1 == 0 and p <= r <= q:
                        if r == p:
                            contacts.add((0, ai, 0, bi))
                        elif r == q:
                            contacts.add((0, aj, 0, bi))
                        else:
                            contacts.add((1, ea, 0, bi))
                    if o2 == 0 and p <= s <= q:
                        if s == p:
                            contacts.add((0, ai, 0, bj))
                        elif s == q:
                            contacts.add((0, aj, 0, bj))
                        else:
                            contacts.add((1, ea, 0, bj))
                    if o3 == 0 and r < p < s:
                        contacts.add((0, ai, 1, eb))
                    if o4 == 0 and r < q < s:
                        contacts.add((0, aj, 1, eb))

    if contacts:
        for akind, ak, bkind, bk in contacts:
            if _contact_overlaps(av, akind, ak, bv, bkind, bk):
                return True
        return False

    # Boundaries are disjoint: overlap only by nesting.
    bx, by = bv[0]
    if _strictly_inside((bx + dx, by + dy), av):
        return True
    ax, ay = av[0]
    return _strictly_inside((ax - dx, ay - dy), bv)


def _strictly_inside(pt: Point, verts: Sequence[Point]) -> bool:
    return point_in_polygon(pt, verts) > 0


def inside_container(shape: ChainSet, pos: Point, container: Sequence[Point]) -> bool:
    """Every translated vertex lies in the closed convex container."""
    tx, ty = pos
    n = len(container)
    for i in range(n):
        ax, ay = container[i]
        bx, by = container[(i + 1) % n]
        ex, ey = bx - ax, by - ay
        for x, y in shape.vertices:
            if ex * (y + ty - ay) - ey * (x + tx - ax) < 0:
                return False
    return True


def require_convex(container: Sequence[Point]) -> None:
    if not is_convex(container):
        raise GeometryError("container must be a convex counterclockwise polygon")
