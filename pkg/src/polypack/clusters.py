"""Cluster preprocessing: compatibility graphs, assembly and generation growth.

A cluster is a rigid multiset of items at fixed relative offsets. Clusters grow
one item per generation; after each generation only the ``m_per_item`` best
clusters containing any given item survive.
"""
from __future__ import annotations

import enum
import math
import random
import statistics
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .geometry import (
    GeometryError,
    Point,
    ShapeMetrics,
    bounding_box,
    convex_hull,
    doubled_signed_area,
    is_simple,
    remove_collinear,
    shape_metrics,
)
from .greedy import Unit, UtilityKind, item_units
from .model import Instance, ItemShape
from .overlap import items_overlap

ANGLE_BUCKETS = 16


class AreaMode(enum.Enum):
    HULL = "hull"
    WEIGHTED_MIX = "mix"


class GraphKind(enum.Enum):
    RAND = "rand"
    SKINNY = "skinny"
    CONCAV = "concav"
    SHEAR = "shear"
    ATRIS = "atris"


@dataclass
class ClusterConfig:
    alpha: float = 1.5
    m_per_item: int = 4
    max_generation: int = 4
    gauss_sigma: float = 0.1
    area_mode: AreaMode = AreaMode.HULL
    mix_lambda: float = 0.5
    penalty_floor: float = 0.01
    rand_group_size: int = 100
    skinny_ratio: float = 3.0
    grid_points_assembly: int = 100
    # partner items tried per cluster and generation; None tries all of them
    max_partners: int | None = 8
    # "auto" runs both routines below 2000 items, vertex-only above
    assembly: str = "auto"
    pocket_fraction: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.alpha <= 2:
            raise ValueError("alpha must lie in [1, 2]")
        if self.m_per_item < 1:
            raise ValueError("m_per_item must be >= 1")
        if not 100 <= self.grid_points_assembly <= 1000:
            raise ValueError("grid_points_assembly must lie in [100, 1000]")
        if self.max_generation < 1:
            raise ValueError("max_generation must be >= 1")
        if self.assembly not in ("auto", "both", "grid", "vertex"):
            raise ValueError(f"unknown assembly mode {self.assembly!r}")
        if not 0 <= self.mix_lambda <= 1:
            raise ValueError("mix_lambda must lie in [0, 1]")


@dataclass
class Cluster:
    members: tuple[tuple[int, Point], ...]
    hull: tuple[Point, ...]
    union_value: int
    hull_doubled_area: int
    sum_item_doubled_area: int
    utility: float = 0.0
    penalty: float = 1.0
    hull_metrics: ShapeMetrics | None = field(default=None, repr=False, compare=False)

    @property
    def size(self) -> int:
        return len(self.members)

    def counts(self) -> Counter:
        return Counter(i for i, _ in self.members)

    def key(self) -> tuple:
        return normalized_key(self.members)


def normalized_key(members: Iterable[tuple[int, Point]]) -> tuple:
    """Translation-invariant identity of a member multiset."""
    ms = sorted(members)
    ox, oy = ms[0][1]
    return tuple((i, (x - ox, y - oy)) for i, (x, y) in ms)


def thickness(m: ShapeMetrics) -> float:
    return float(m.thickness)


def compute_penalty(hull_metrics: ShapeMetrics, member_metrics: Iterable[ShapeMetrics], floor: float = 0.0) -> float:
    """min(1, T(hull) / max T(member)), floored; T is width over diameter."""
    tmax = max(thickness(m) for m in member_metrics)
    p = min(1.0, thickness(hull_metrics) / tmax)
    return max(floor, p)


def draw_gauss(rng: random.Random, sigma: float) -> float:
    if sigma <= 0:
        return 1.0
    return min(1.5, max(0.5, rng.gauss(1.0, sigma)))


def _area(hull2: int, sum2: int, cfg: ClusterConfig) -> float:
    if cfg.area_mode is AreaMode.HULL:
        return hull2 / 2
    lam = cfg.mix_lambda
    return (lam * hull2 + (1 - lam) * sum2) / 2


def area_term(c: Cluster, cfg: ClusterConfig) -> float:
    return _area(c.hull_doubled_area, c.sum_item_doubled_area, cfg)


def cluster_utility(
    c: Cluster,
    cfg: ClusterConfig,
    rng: random.Random | None = None,
    gauss: float | None = None,
) -> float:
    """gauss * value^alpha * penalty / area.

    ``gauss`` is drawn from ``rng`` unless given explicitly.
    """
    if gauss is None:
        gauss = draw_gauss(rng or random.Random(cfg.seed), cfg.gauss_sigma)
    area = area_term(c, cfg)
    if area <= 0:
        raise GeometryError("cluster area term must be positive")
    return gauss * c.union_value**cfg.alpha * c.penalty / area


def make_cluster(
    items: Sequence[ItemShape],
    members: Sequence[tuple[int, Point]],
    cfg: ClusterConfig,
) -> Cluster:
    """Build a cluster (utility with gauss = 1) from members at offsets.

    Offsets are normalized so the smallest member sits at the origin.
    """
    key = normalized_key(members)
    pts = [(x + ox, y + oy) for i, (ox, oy) in key for x, y in items[i].hull]
    hull = tuple(convex_hull(pts))
    hm = shape_metrics(hull)
    penalty = compute_penalty(hm, (items[i].metrics for i, _ in key), cfg.penalty_floor)
    c = Cluster(
        members=key,
        hull=hull,
        union_value=sum(items[i].value for i, _ in key),
        hull_doubled_area=hm.doubled_area,
        sum_item_doubled_area=sum(items[i].doubled_area for i, _ in key),
        penalty=penalty,
        hull_metrics=hm,
    )
    c.utility = cluster_utility(c, cfg, gauss=1.0)
    return c


def single_cluster(items: Sequence[ItemShape], i: int, cfg: ClusterConfig) -> Cluster:
    return make_cluster(items, [(i, (0, 0))], cfg)


# -- compatibility graphs --------------------------------------------------


@dataclass
class CompatGraph:
    kind: GraphKind
    n: int
    adj: list[set[int]]

    @classmethod
    def empty(cls, kind: GraphKind, n: int) -> "CompatGraph":
        return cls(kind, n, [set() for _ in range(n)])

    def add_clique(self, vs: Sequence[int]) -> None:
        for a in vs:
            for b in vs:
                if a != b:
                    self.adj[a].add(b)

    def add_edge(self, a: int, b: int) -> None:
        if a != b:
            self.adj[a].add(b)
            self.adj[b].add(a)

    def edges(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.n) for b in sorted(self.adj[a]) if a < b]

    @property
    def edge_count(self) -> int:
        return sum(len(s) for s in self.adj) // 2


def build_rand_graph(items: Sequence[ItemShape], cfg: ClusterConfig, rng: random.Random) -> CompatGraph:
    g = CompatGraph.empty(GraphKind.RAND, len(items))
    order = list(range(len(items)))
    rng.shuffle(order)
    s = max(1, cfg.rand_group_size)
    for k in range(0, len(order), s):
        g.add_clique(order[k : k + s])
    return g


def _angle_bucket(dx: int, dy: int) -> int:
    a = math.atan2(dy, dx) % math.pi
    return min(ANGLE_BUCKETS - 1, int(a / (math.pi / ANGLE_BUCKETS))) % ANGLE_BUCKETS


def _is_skinny(m: ShapeMetrics, ratio: float) -> bool:
    # exact: d2 / span > ratio with ratio as a rational
    return m.diameter_sq > Fraction(ratio) * m.width_span


def build_skinny_graph(items: Sequence[ItemShape], cfg: ClusterConfig) -> CompatGraph:
    g = CompatGraph.empty(GraphKind.SKINNY, len(items))
    buckets: dict[int, list[int]] = defaultdict(list)
    for it in items:
        m = it.metrics
        if not _is_skinny(m, cfg.skinny_ratio):
            continue
        (ax, ay), (bx, by) = m.longest_edge
        buckets[_angle_bucket(bx - ax, by - ay)].append(it.index)
    for b, vs in buckets.items():
        g.add_clique(vs)
        for u in vs:
            for w in buckets.get((b + 1) % ANGLE_BUCKETS, ()):
                g.add_edge(u, w)
    return g


def pockets(poly: Sequence[Point]) -> list[tuple[int, tuple[int, int, int, int]]]:
    """Regions of hull minus polygon as (doubled area, bounding box)."""
    try:
        hull = set(convex_hull(poly))
    except GeometryError:
        return []
    n = len(poly)
    on = [i for i in range(n) if poly[i] in hull]
    out = []
    for k, a in enumerate(on):
        b = on[(k + 1) % len(on)]
        if (b - a) % n <= 1:
            continue
        chain = [poly[(a + t) % n] for t in range((b - a) % n + 1)]
        # chain runs CCW along the item, so the pocket loop is clockwise
        a2 = -doubled_signed_area(chain)
        if a2 > 0:
            out.append((a2, bounding_box(chain)))
    return out


def build_concav_graph(items: Sequence[ItemShape], cfg: ClusterConfig | None = None) -> CompatGraph:
    frac = cfg.pocket_fraction if cfg is not None else 0.1
    g = CompatGraph.empty(GraphKind.CONCAV, len(items))
    boxes = []
    for it in items:
        keep = [bx for a2, bx in pockets(it.vertices) if a2 >= frac * it.doubled_area]
        boxes.append([(bx[2] - bx[0], bx[3] - bx[1]) for bx in keep])
    for it in items:
        for pw, ph in boxes[it.index]:
            for other in items:
                if other.index == it.index:
                    continue
                b = other.box
                if pw >= b[2] - b[0] and ph >= b[3] - b[1]:
                    g.add_edge(it.index, other.index)
    return g


def dominant_directions(poly: Sequence[Point]) -> tuple[int, int]:
    """The two angle buckets carrying the most total edge length."""
    length: dict[int, float] = defaultdict(float)
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        dx, dy = b[0] - a[0], b[1] - a[1]
        length[_angle_bucket(dx, dy)] += math.hypot(dx, dy)
    ranked = sorted(length, key=lambda k: (-length[k], k))
    if len(ranked) == 1:
        return ranked[0], ranked[0]
    return tuple(sorted(ranked[:2]))  # type: ignore[return-value]


def build_shear_graph(items: Sequence[ItemShape]) -> CompatGraph:
    g = CompatGraph.empty(GraphKind.SHEAR, len(items))
    groups: dict[tuple[int, int], list[int]] = defaultdict(list)
    for it in items:
        groups[dominant_directions(it.vertices)].append(it.index)
    for vs in groups.values():
        g.add_clique(vs)
    return g


# -- contour words and shape classes ----------------------------------------


class ShapeClass(enum.Enum):
    BAR = "bar"
    CROSS = "cross"
    ELL = "ell"
    WYE = "wye"
    WAVE = "wave"
    OTHER = "other"


STEP = {(1, 0): "R", (0, 1): "U", (-1, 0): "L", (0, -1): "D"}
_ROT = {"R": "U", "U": "L", "L": "D", "D": "R"}


def contour_word(poly: Sequence[Point]) -> str | None:
    """Unit-step word of an axis-parallel lattice polygon, or None."""
    out = []
    n = len(poly)
    for i in range(n):
        (ax, ay), (bx, by) = poly[i], poly[(i + 1) % n]
        dx, dy = bx - ax, by - ay
        if dx and dy:
            return None
        L = abs(dx) + abs(dy)
        if L == 0:
            return None
        out.append(STEP[(dx // L, dy // L)] * L)
    return "".join(out)


def canonical_word(word: str) -> str:
    """Least cyclic shift over the four lattice rotations."""
    best = None
    w = word
    for _ in range(4):
        for k in range(len(w)):
            s = w[k:] + w[:k]
            if best is None or s < best:
                best = s
        w = "".join(_ROT[c] for c in w)
    return best or ""


def _cells_word(cells: Sequence[tuple[int, int]]) -> str:
    from .generate import polyomino_polygon

    return canonical_word(contour_word(polyomino_polygon(cells, 1)) or "")


def _mirror(cells):
    return [(-x, y) for x, y in cells]


_TEMPLATE_CELLS: dict[ShapeClass, list[list[tuple[int, int]]]] = {
    ShapeClass.CROSS: [[(1, 0), (0, 1), (1, 1), (2, 1), (1, 2)]],
    ShapeClass.ELL: [
        [(0, 0), (1, 0), (0, 1)],
        [(0, 0), (1, 0), (2, 0), (0, 1)],
        [(0, 0), (1, 0), (2, 0), (3, 0), (0, 1)],
        [(0, 0), (1, 0), (2, 0), (0, 1), (0, 2)],
    ],
    ShapeClass.WYE: [
        [(0, 0), (1, 0), (2, 0), (1, 1)],
        [(0, 0), (1, 0), (2, 0), (3, 0), (1, 1)],
    ],
    ShapeClass.WAVE: [
        [(0, 0), (1, 0), (1, 1), (2, 1)],
        [(0, 0), (0, 1), (1, 1), (1, 2), (2, 2)],
    ],
}


def _template_words() -> dict[str, ShapeClass]:
    out: dict[str, ShapeClass] = {}
    for cls, shapes in _TEMPLATE_CELLS.items():
        for cells in shapes:
            # both chiralities listed: the word canon only quotients rotations
            out[_cells_word(cells)] = cls
            out[_cells_word(_mirror(cells))] = cls
    return out


_TEMPLATES: dict[str, ShapeClass] | None = None


def templates() -> dict[str, ShapeClass]:
    global _TEMPLATES
    if _TEMPLATES is None:
        _TEMPLATES = _template_words()
    return _TEMPLATES


def classify_word(word: str) -> ShapeClass:
    c = canonical_word(word)
    # 1 x k bar, k >= 2
    k = (len(c) - 2) // 2
    if k >= 2 and len(c) == 2 * k + 2 and c == canonical_word("R" * k + "U" + "L" * k + "D"):
        return ShapeClass.BAR
    return templates().get(c, ShapeClass.OTHER)


def lattice_unit(items: Sequence[ItemShape]) -> float:
    """Median over items of the shortest edge length."""
    mins = []
    for it in items:
        v = it.vertices
        n = len(v)
        mins.append(min(math.dist(v[i], v[(i + 1) % n]) for i in range(n)))
    return statistics.median(mins)


def snap(poly: Sequence[Point], unit: float) -> list[Point] | None:
    """Round vertices to the lattice of pitch ``unit`` around the first vertex."""
    if unit <= 0:
        return None
    x0, y0 = poly[0]
    pts: list[Point] = []
    for x, y in poly:
        p = (round((x - x0) / unit), round((y - y0) / unit))
        if not pts or pts[-1] != p:
            pts.append(p)
    while len(pts) > 1 and pts[0] == pts[-1]:
        pts.pop()
    if len(pts) < 4:
        return None
    pts = remove_collinear(pts)
    if len(set(pts)) != len(pts) or doubled_signed_area(pts) <= 0 or not is_simple(pts):
        return None
    return pts


@dataclass
class AtrisShape:
    snapped: bool
    word: str | None
    shape_class: ShapeClass


def classify_item(poly: Sequence[Point], unit: float) -> AtrisShape:
    s = snap(poly, unit)
    if s is None:
        return AtrisShape(False, None, ShapeClass.OTHER)
    w = contour_word(s)
    if w is None:
        return AtrisShape(False, None, ShapeClass.OTHER)
    return AtrisShape(True, canonical_word(w), classify_word(w))


COMPLEMENTS = {
    frozenset((ShapeClass.ELL,)),
    frozenset((ShapeClass.WAVE,)),
    frozenset((ShapeClass.CROSS, ShapeClass.ELL)),
    frozenset((ShapeClass.BAR,)),
    frozenset((ShapeClass.WYE,)),
}


def complementary(a: ShapeClass, b: ShapeClass) -> bool:
    if ShapeClass.BAR in (a, b):
        return True
    return frozenset((a, b)) in COMPLEMENTS


def build_atris_graph(items: Sequence[ItemShape], unit: float | None = None) -> CompatGraph:
    g = CompatGraph.empty(GraphKind.ATRIS, len(items))
    if not items:
        return g
    u = lattice_unit(items) if unit is None else unit
    shapes = [classify_item(it.vertices, u) for it in items]
    for i in range(len(items)):
        if not shapes[i].snapped:
            continue
        for j in range(i + 1, len(items)):
            if shapes[j].snapped and complementary(shapes[i].shape_class, shapes[j].shape_class):
                g.add_edge(i, j)
    return g


def build_graph(kind: GraphKind, items: Sequence[ItemShape], cfg: ClusterConfig, rng: random.Random) -> CompatGraph:
    if kind is GraphKind.RAND:
        return build_rand_graph(items, cfg, rng)
    if kind is GraphKind.SKINNY:
        return build_skinny_graph(items, cfg)
    if kind is GraphKind.CONCAV:
        return build_concav_graph(items, cfg)
    if kind is GraphKind.SHEAR:
        return build_shear_graph(items)
    if kind is GraphKind.ATRIS:
        return build_atris_graph(items)
    raise ValueError(kind)


# -- assembly ---------------------------------------------------------------


def _fits_cluster(items: Sequence[ItemShape], c: Cluster, i: int, t: Point) -> bool:
    ch = items[i].chains
    for j, o in c.members:
        if items_overlap(ch, t, items[j].chains, o):
            return False
    return True


def _best_of(items, c, i, translations, cfg) -> Cluster | None:
    best = None
    seen = set()
    value = (c.union_value + items[i].value) ** cfg.alpha
    sum2 = c.sum_item_doubled_area + items[i].doubled_area
    ihull = items[i].hull
    for t in translations:
        if t in seen:
            continue
        seen.add(t)
        if not _fits_cluster(items, c, i, t):
            continue
        tx, ty = t
        hull = convex_hull(list(c.hull) + [(x + tx, y + ty) for x, y in ihull])
        # penalty <= 1, so this bounds the candidate's utility from above
        if best is not None and value / _area(doubled_signed_area(hull), sum2, cfg) <= best.utility:
            continue
        cand = make_cluster(items, list(c.members) + [(i, t)], cfg)
        if best is None or cand.utility > best.utility:
            best = cand
    return best


def _finalize(c: Cluster | None, cfg: ClusterConfig, rng: random.Random | None) -> Cluster | None:
    # candidates compete on the noiseless utility; the chosen one gets the noise
    if c is not None and rng is not None:
        c.utility = cluster_utility(c, cfg, rng)
    return c


def assembly_grid(c: Cluster, item: ItemShape, n_points: int) -> list[Point]:
    """Translations of ``item`` on a lattice over the hull box inflated by the item box."""
    hx0, hy0, hx1, hy1 = bounding_box(c.hull)
    bx0, by0, bx1, by1 = item.box
    tx0, tx1 = hx0 - bx1, hx1 - bx0
    ty0, ty1 = hy0 - by1, hy1 - by0
    w, h = tx1 - tx0, ty1 - ty0
    pitch = max(1, round(math.sqrt(max(1, w * h) / n_points)))
    cx, cy = (tx0 + tx1) // 2, (ty0 + ty1) // 2
    kx, ky = w // (2 * pitch), h // (2 * pitch)
    pts = [(cx + a * pitch, cy + b * pitch) for b in range(-ky, ky + 1) for a in range(-kx, kx + 1)]
    # nearest to the center first so ties favour compact placements
    pts.sort(key=lambda p: ((p[0] - cx) ** 2 + (p[1] - cy) ** 2, p))
    return pts


def assemble_grid(
    c: Cluster,
    item_index: int,
    items: Sequence[ItemShape],
    cfg: ClusterConfig,
    rng: random.Random | None = None,
) -> Cluster | None:
    pts = assembly_grid(c, items[item_index], cfg.grid_points_assembly)
    return _finalize(_best_of(items, c, item_index, pts, cfg), cfg, rng)


def vertex_translations(c: Cluster, item_index: int, items: Sequence[ItemShape]) -> list[Point]:
    cverts = sorted({(x + ox, y + oy) for j, (ox, oy) in c.members for x, y in items[j].vertices})
    return [(cx - vx, cy - vy) for cx, cy in cverts for vx, vy in items[item_index].vertices]


def assemble_vertex(
    c: Cluster,
    item_index: int,
    items: Sequence[ItemShape],
    cfg: ClusterConfig,
    rng: random.Random | None = None,
) -> Cluster | None:
    """Try every translation that puts an item vertex on a member vertex."""
    ts = vertex_translations(c, item_index, items)
    return _finalize(_best_of(items, c, item_index, ts, cfg), cfg, rng)


def assemble(
    c: Cluster,
    item_index: int,
    items: Sequence[ItemShape],
    cfg: ClusterConfig,
    rng: random.Random | None = None,
) -> Cluster | None:
    mode = cfg.assembly
    if mode == "auto":
        mode = "both" if len(items) < 2000 else "vertex"
    cands = []
    if mode in ("both", "grid"):
        cands.append(_best_of(items, c, item_index, assembly_grid(c, items[item_index], cfg.grid_points_assembly), cfg))
    if mode in ("both", "vertex"):
        cands.append(_best_of(items, c, item_index, vertex_translations(c, item_index, items), cfg))
    best = None
    for k in cands:
        if k is not None and (best is None or k.utility > best.utility):
            best = k
    return _finalize(best, cfg, rng)


# -- generations ------------------------------------------------------------


def _retain(cands: Sequence[Cluster], m: int) -> list[Cluster]:
    kept = []
    per_item: Counter = Counter()
    for c in sorted(cands, key=lambda c: (-c.utility, c.key())):
        ids = set(i for i, _ in c.members)
        if all(per_item[i] < m for i in ids):
            kept.append(c)
            for i in ids:
                per_item[i] += 1
    return kept


def generate_clusters(
    instance: Instance,
    graphs: Sequence[CompatGraph],
    cfg: ClusterConfig,
    rng: random.Random | None = None,
) -> list[Cluster]:
    """All retained clusters of two or more members, best first."""
    rng = rng or random.Random(cfg.seed)
    items = instance.items
    n = len(items)
    adj: list[set[int]] = [set() for _ in range(n)]
    for g in graphs:
        for a in range(n):
            adj[a] |= g.adj[a]
    current = [single_cluster(items, i, cfg) for i in range(n)]
    pool: list[Cluster] = []
    for _gen in range(2, cfg.max_generation + 1):
        found: dict[tuple, Cluster] = {}
        for c in current:
            have = c.counts()
            partners = sorted(set().union(*(adj[i] for i in have)))
            partners = [j for j in partners if have[j] < items[j].quantity]
            if cfg.max_partners is not None and len(partners) > cfg.max_partners:
                partners = sorted(rng.sample(partners, cfg.max_partners))
            for j in partners:
                new = assemble(c, j, items, cfg, rng)
                if new is None:
                    continue
                k = new.key()
                if k not in found or new.utility > found[k].utility:
                    found[k] = new
        current = _retain(list(found.values()), cfg.m_per_item)
        if not current:
            break
        pool.extend(current)
    pool.sort(key=lambda c: (-c.utility, c.key()))
    return pool


def default_graphs(instance: Instance, cfg: ClusterConfig, rng: random.Random, kinds: Iterable[GraphKind] | None = None) -> list[CompatGraph]:
    kinds = list(kinds) if kinds is not None else [GraphKind.RAND, GraphKind.SKINNY, GraphKind.CONCAV]
    return [build_graph(k, instance.items, cfg, rng) for k in kinds]


def cluster_unit(c: Cluster) -> Unit:
    m = c.hull_metrics or shape_metrics(c.hull)
    return Unit(c.members, c.utility, m.centroid, m)


def clusters_as_items(
    pool: Sequence[Cluster],
    instance: Instance,
    cfg: ClusterConfig | None = None,
    kind: UtilityKind = UtilityKind.VALUE_PER_AREA,
) -> list[Unit]:
    """Clusters and single items in one list, by decreasing cluster utility.

    Singles are scored with the same formula (one-member clusters) so both
    kinds compare on one scale. With an empty pool the plain item order of
    the greedy constructor is returned unchanged.
    """
    if not pool:
        return item_units(instance, kind)
    cfg = cfg or ClusterConfig()
    units = [cluster_unit(single_cluster(instance.items, i, cfg)) for i in range(len(instance.items))]
    units += [cluster_unit(c) for c in pool]
    # stable: singles precede equal-utility clusters
    return sorted(units, key=lambda u: -u.utility)


def cluster_from_members(instance: Instance, members: Sequence[tuple[int, Point]], utility: float, cfg: ClusterConfig | None = None) -> Cluster:
    c = make_cluster(instance.items, members, cfg or ClusterConfig())
    c.utility = float(utility)
    return c
