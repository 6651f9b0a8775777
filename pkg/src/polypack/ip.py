"""Conflict-graph integer programming: candidates, exact solver, LP export, refinement.

Packing a set of candidate placements is a maximum-weight independent set
with per-item capacity cliques: overlapping candidates exclude each other and
at most ``q_i`` candidates of item ``i`` may be chosen.
"""
from __future__ import annotations

import io
import math
import os
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, TextIO

from .geometry import GeometryError, Point, convex_hull, doubled_signed_area, remove_collinear
from .grid import grid_new
from .model import Instance, Placement, Solution
from .overlap import items_overlap

# -- candidates -------------------------------------------------------------


@dataclass(frozen=True)
class Candidate:
    item_index: int
    translation: Point
    weight: int


@dataclass
class CandidateSet:
    vertices: list[Candidate] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def union(self, other: "CandidateSet") -> "CandidateSet":
        """Concatenation with exact duplicates dropped, first occurrence kept."""
        seen = set()
        out = []
        for c in list(self.vertices) + list(other.vertices):
            k = (c.item_index, c.translation)
            if k not in seen:
                seen.add(k)
                out.append(c)
        return CandidateSet(out)


def sample_uniform(instance: Instance, per_item: int, rng: random.Random) -> CandidateSet:
    """Up to ``per_item`` uniformly drawn container-feasible translations per item."""
    if per_item < 0:
        raise ValueError("per_item must be >= 0")
    out: list[Candidate] = []
    for it in instance.items:
        x0, y0, x1, y1 = instance.translation_range(it.index)
        if x0 > x1 or y0 > y1:
            continue
        seen = set()
        for _ in range(per_item):
            t = (rng.randint(x0, x1), rng.randint(y0, y1))
            if t in seen:
                continue
            if instance.fits_container(it.index, t):
                seen.add(t)
                out.append(Candidate(it.index, t, it.value))
    return CandidateSet(out)


def neighborhood_candidates(
    instance: Instance,
    solution: Solution,
    sigma: float,
    k: int,
    rng: random.Random,
) -> CandidateSet:
    """The zero offset plus ``k`` rounded Gaussian offsets around every placement."""
    if sigma <= 0 or k < 1:
        raise ValueError("need sigma > 0 and k >= 1")
    out: list[Candidate] = []
    seen = set()
    for p in solution.placements:
        i = p.item_index
        tx, ty = p.translation
        w = instance.items[i].value
        offs = [(0, 0)] + [(round(rng.gauss(0, sigma)), round(rng.gauss(0, sigma))) for _ in range(k)]
        for dx, dy in offs:
            t = (tx + dx, ty + dy)
            if (i, t) in seen or not instance.fits_container(i, t):
                continue
            seen.add((i, t))
            out.append(Candidate(i, t, w))
    return CandidateSet(out)


# -- conflict graph ---------------------------------------------------------


@dataclass
class ConflictGraph:
    weights: list[int]
    edges: list[tuple[int, int]]
    # item index -> (vertex ids, capacity)
    cliques: dict[int, tuple[list[int], int]]
    candidates: list[Candidate] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.weights)

    def clique_of(self) -> list[int]:
        cl = [-1] * self.n
        for key, (vs, _) in self.cliques.items():
            for v in vs:
                cl[v] = key
        return cl

    def is_feasible(self, selection: Iterable[int]) -> bool:
        sel = set(selection)
        if any(not 0 <= v < self.n for v in sel):
            return False
        for u, v in self.edges:
            if u in sel and v in sel:
                return False
        for vs, cap in self.cliques.values():
            if sum(1 for v in vs if v in sel) > cap:
                return False
        return True

    def value(self, selection: Iterable[int]) -> int:
        return sum(self.weights[v] for v in selection)


def graph_from_parts(
    weights: Sequence[int],
    edges: Iterable[tuple[int, int]],
    cliques: Sequence[tuple[Sequence[int], int]],
) -> ConflictGraph:
    """Abstract conflict graph (no geometry); clique keys are their list positions."""
    es = sorted({(min(u, v), max(u, v)) for u, v in edges if u != v})
    return ConflictGraph(list(weights), es, {k: (list(vs), cap) for k, (vs, cap) in enumerate(cliques)})


def build_conflict_graph(cands: CandidateSet, instance: Instance) -> ConflictGraph:
    vs = list(cands.vertices)
    items = instance.items
    grid = grid_new(instance.box, [it.box for it in items])
    edges = []
    for k, c in enumerate(vs):
        b = items[c.item_index].box
        tx, ty = c.translation
        box = (b[0] + tx, b[1] + ty, b[2] + tx, b[3] + ty)
        ch = items[c.item_index].chains
        for j in sorted(grid.candidates(box)):
            o = vs[j]
            if items_overlap(ch, c.translation, items[o.item_index].chains, o.translation):
                edges.append((j, k))
        grid.insert(k, box)
    cliques: dict[int, tuple[list[int], int]] = {}
    for k, c in enumerate(vs):
        cliques.setdefault(c.item_index, ([], items[c.item_index].quantity))[0].append(k)
    return ConflictGraph([c.weight for c in vs], sorted(edges), cliques, vs)


# -- exact solver -----------------------------------------------------------


@dataclass
class SolverLimits:
    node_cap: int | None = None
    time_cap: float | None = None  # seconds; makes results timing-dependent


@dataclass
class SolveResult:
    selection: list[int]
    value: int
    proven_optimal: bool
    nodes: int


def solve_exact(
    g: ConflictGraph,
    limits: SolverLimits | None = None,
    warm_start: Iterable[int] | None = None,
) -> SolveResult:
    """Depth-first branch-and-bound for the capacitated independent set.

    Branches on the heaviest undecided vertex, including it first. The bound
    at each node is the smaller of two relaxations: per clique, the heaviest
    ``cap - used`` open vertices; and a greedy clique cover of the open
    vertices in the overlap graph, one vertex per cover clique.
    """
    limits = limits or SolverLimits()
    n = g.n
    if n == 0:
        return SolveResult([], 0, True, 0)
    order = sorted(range(n), key=lambda v: (-g.weights[v], v))
    pos = {v: k for k, v in enumerate(order)}  # bit k = k-th heaviest vertex
    w = [g.weights[v] for v in order]
    adj = [0] * n
    for u, v in g.edges:
        a, b = pos[u], pos[v]
        adj[a] |= 1 << b
        adj[b] |= 1 << a
    clique_mask: list[int] = []
    cap: list[int] = []
    cl = [-1] * n
    for vs, c in g.cliques.values():
        m = 0
        for v in vs:
            m |= 1 << pos[v]
            cl[pos[v]] = len(cap)
        clique_mask.append(m)
        cap.append(c)
    for b in range(n):
        if cl[b] < 0:  # unconstrained vertex: a private clique that never fills
            cl[b] = len(cap)
            clique_mask.append(1 << b)
            cap.append(1 << 30)
    # conflict for the cover bound: overlap edges plus capacity-1 siblings
    conf = list(adj)
    for k, m in enumerate(clique_mask):
        if cap[k] == 1:
            mm = m
            while mm:
                low = mm & -mm
                b = low.bit_length() - 1
                conf[b] |= m & ~low
                mm ^= low
    full = (1 << n) - 1
    for k, m in enumerate(clique_mask):
        if cap[k] <= 0:
            full &= ~m

    def bits(mask: int):
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low

    def cap_bound(P: int, used: list[int]) -> int:
        total = 0
        for k, m in enumerate(clique_mask):
            room = cap[k] - used[k]
            sub = P & m
            if room <= 0 or not sub:
                continue
            for b in bits(sub):  # ascending bit = descending weight
                total += w[b]
                room -= 1
                if room == 0:
                    break
        return total

    def cover_bound(P: int) -> int:
        heads: list[tuple[int, int]] = []  # (common neighbourhood, head weight)
        total = 0
        for b in bits(P):
            bb = 1 << b
            for k in range(len(heads)):
                common, hw = heads[k]
                if common & bb:
                    heads[k] = (common & conf[b], hw)
                    break
            else:
                heads.append((conf[b], w[b]))
                total += w[b]
        return total

    best_val = -1
    best_sel: list[int] = []
    if warm_start is not None:
        ws = list(warm_start)
        if g.is_feasible(ws):
            best_val = g.value(ws)
            best_sel = sorted(ws)
    nodes = 0
    start = time.perf_counter()
    complete = True
    # stack entries: (open mask, value, chosen bits, per-clique used counts)
    stack: list[tuple[int, int, tuple[int, ...], list[int]]] = [(full, 0, (), [0] * len(cap))]
    while stack:
        P, val, chosen, used = stack.pop()
        nodes += 1
        if limits.node_cap is not None and nodes > limits.node_cap:
            complete = False
            break
        if limits.time_cap is not None and (nodes & 255) == 0 and time.perf_counter() - start > limits.time_cap:
            complete = False
            break
        if not P:
            if val > best_val:
                best_val = val
                best_sel = sorted(order[b] for b in chosen)
            continue
        if val + cap_bound(P, used) <= best_val:
            continue
        if val + cover_bound(P) <= best_val:
            continue
        low = P & -P
        b = low.bit_length() - 1
        # exclude branch pushed first so the include branch is explored first
        stack.append((P ^ low, val, chosen, used))
        k = cl[b]
        u2 = used.copy()
        u2[k] += 1
        P2 = P & ~adj[b] & ~low
        if u2[k] >= cap[k]:
            P2 &= ~clique_mask[k]
        stack.append((P2, val + w[b], chosen + (b,), u2))
    if best_val < 0:
        best_val, best_sel = 0, []
    return SolveResult(best_sel, best_val, complete, nodes)


# -- LP files ---------------------------------------------------------------


class LpParseError(ValueError):
    pass


def _var(v: int) -> str:
    return f"x_{v}"


def _terms(parts: Sequence[str], head: str, per_line: int = 12) -> list[str]:
    """Wrap a long linear expression; continuation lines start with a space."""
    lines = []
    for k in range(0, max(len(parts), 1), per_line):
        body = " + ".join(parts[k : k + per_line])
        lines.append(f"{head} {body}".rstrip() if k == 0 else f"   + {body}")
    return lines


def write_lp(g: ConflictGraph, out: TextIO) -> None:
    """Write the model in LP format; variable ``x_<id>`` is vertex ``id``."""
    out.write("\\ capacitated independent set over candidate placements\n")
    out.write("Maximize\n")
    for line in _terms([f"{g.weights[v]} {_var(v)}" for v in range(g.n)], " obj:"):
        out.write(line + "\n")
    out.write("Subject To\n")
    for k, (u, v) in enumerate(g.edges):
        out.write(f" e{k}: {_var(u)} + {_var(v)} <= 1\n")
    for key in sorted(g.cliques):
        vs, cap = g.cliques[key]
        if not vs:
            continue
        lines = _terms([_var(v) for v in vs], f" q{key}:")
        lines[-1] += f" <= {cap}"
        for line in lines:
            out.write(line + "\n")
    out.write("Binary\n")
    for v in range(g.n):
        out.write(f" {_var(v)}\n")
    out.write("End\n")


def export_lp(g: ConflictGraph, destination: str | os.PathLike | TextIO) -> None:
    if hasattr(destination, "write"):
        write_lp(g, destination)  # type: ignore[arg-type]
        return
    try:
        with open(destination, "w", encoding="ascii") as f:
            write_lp(g, f)
    except OSError as e:
        raise OSError(f"cannot write LP file {destination}: {e.strerror}") from e


def lp_text(g: ConflictGraph) -> str:
    buf = io.StringIO()
    write_lp(g, buf)
    return buf.getvalue()


def parse_assignment(text: str, known: int | None = None) -> list[int]:
    """Selected ids from ``x_<id> <value>`` lines; ``known`` bounds valid ids."""
    sel = []
    seen = set()
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or not parts[0].startswith("x_") or not parts[0][2:].isdigit():
            raise LpParseError(f"line {ln}: expected 'x_<id> <value>', got {raw!r}")
        vid = int(parts[0][2:])
        try:
            val = float(parts[1])
        except ValueError:
            raise LpParseError(f"line {ln}: value {parts[1]!r} is not a number") from None
        r = round(val)
        if abs(val - r) > 1e-6 or r not in (0, 1):
            raise LpParseError(f"line {ln}: value {parts[1]} is not binary")
        if vid in seen:
            raise LpParseError(f"line {ln}: duplicate id x_{vid}")
        if known is not None and vid >= known:
            raise LpParseError(f"line {ln}: unknown id x_{vid}")
        seen.add(vid)
        if r == 1:
            sel.append(vid)
    return sorted(sel)


def import_assignment(source: str | os.PathLike | TextIO, known: int | None = None) -> list[int]:
    if hasattr(source, "read"):
        return parse_assignment(source.read(), known)  # type: ignore[union-attr]
    with open(source, encoding="utf-8") as f:
        return parse_assignment(f.read(), known)


# -- refinement and partitioning -------------------------------------------


@dataclass
class RefinementSchedule:
    sigma0: float | None = None  # default: a tenth of the container width
    decay: float = 0.5
    rounds: int = 4
    neighbors_per_placement: int = 5
    uniform_extra_per_item: int = 5
    node_cap: int | None = 20000
    time_cap: float | None = None

    def __post_init__(self):
        if self.sigma0 is not None and self.sigma0 <= 0:
            raise ValueError("sigma0 must be > 0")
        if not 0 < self.decay < 1:
            raise ValueError("decay must lie in (0, 1)")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")

    @property
    def limits(self) -> SolverLimits:
        return SolverLimits(self.node_cap, self.time_cap)


def selection_solution(instance: Instance, g: ConflictGraph, selection: Iterable[int]) -> Solution:
    ps = [Placement(g.candidates[v].item_index, g.candidates[v].translation) for v in sorted(selection)]
    return Solution(instance.name, tuple(ps))


def solve_candidates(instance: Instance, cands: CandidateSet, limits: SolverLimits, warm: Solution | None = None) -> Solution:
    g = build_conflict_graph(cands, instance)
    ws = None
    if warm is not None:
        idx = {(c.item_index, c.translation): k for k, c in reversed(list(enumerate(g.candidates)))}
        ws = [idx[(p.item_index, p.translation)] for p in warm.placements if (p.item_index, p.translation) in idx]
    res = solve_exact(g, limits, ws)
    return selection_solution(instance, g, res.selection)


def _solution_candidates(instance: Instance, sol: Solution) -> Iterable[Candidate]:
    for p in sol.placements:
        yield Candidate(p.item_index, p.translation, instance.items[p.item_index].value)


def refine(
    instance: Instance,
    initial: Solution,
    sched: RefinementSchedule,
    rng: random.Random,
    trace: list[int] | None = None,
) -> Solution:
    """Resample around the current solution, re-solve, keep the result if not worse."""
    box = instance.box
    sigma = sched.sigma0 if sched.sigma0 is not None else max(1.0, (box[2] - box[0]) / 10)
    cur = initial
    cur_val = cur.value(instance)
    if trace is not None:
        trace.append(cur_val)
    for _ in range(sched.rounds):
        cands = CandidateSet(list(_solution_candidates(instance, cur)))
        if cur.placements:
            cands = cands.union(neighborhood_candidates(instance, cur, sigma, sched.neighbors_per_placement, rng))
        cands = cands.union(sample_uniform(instance, sched.uniform_extra_per_item, rng))
        new = solve_candidates(instance, cands, sched.limits, warm=cur)
        v = new.value(instance)
        if v >= cur_val:
            cur, cur_val = new, v
        if trace is not None:
            trace.append(cur_val)
        sigma = max(0.5, sigma * sched.decay)
    return cur


@dataclass
class PartitionConfig:
    cells_x: int = 1
    cells_y: int = 1
    uniform_per_item: int = 40
    schedule: RefinementSchedule = field(default_factory=RefinementSchedule)

    def __post_init__(self):
        if self.cells_x < 1 or self.cells_y < 1:
            raise ValueError("cells_x and cells_y must be >= 1")


def _clip(poly: list[tuple[Fraction, Fraction]], keep) -> list[tuple[Fraction, Fraction]]:
    """Sutherland-Hodgman against one half-plane given as a signed function."""
    out = []
    n = len(poly)
    for k in range(n):
        p, q = poly[k], poly[(k + 1) % n]
        sp, sq = keep(p), keep(q)
        if sp >= 0:
            out.append(p)
        if (sp > 0 > sq) or (sp < 0 < sq):
            t = sp / (sp - sq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def _inside_closed(pt, poly) -> bool:
    n = len(poly)
    for k in range(n):
        (ax, ay), (bx, by) = poly[k], poly[(k + 1) % n]
        if (bx - ax) * (pt[1] - ay) - (by - ay) * (pt[0] - ax) < 0:
            return False
    return True


def clip_cell(container: Sequence[Point], box: tuple[int, int, int, int]) -> list[Point] | None:
    """Integer convex polygon inside ``container`` intersected with ``box``.

    Rational clip vertices are replaced by those of their floor/ceil lattice
    neighbours that lie in the clipped region; the hull of what remains is a
    subset of the region because the region is convex.
    """
    x0, y0, x1, y1 = box
    poly = [(Fraction(x), Fraction(y)) for x, y in container]
    for keep in (
        lambda p: p[0] - x0,
        lambda p: x1 - p[0],
        lambda p: p[1] - y0,
        lambda p: y1 - p[1],
    ):
        poly = _clip(poly, keep)
        if len(poly) < 3:
            return None
    pts = set()
    for px, py in poly:
        for qx in {math.floor(px), math.ceil(px)}:
            for qy in {math.floor(py), math.ceil(py)}:
                if _inside_closed((qx, qy), poly):
                    pts.add((qx, qy))
    try:
        hull = convex_hull(list(pts))
    except GeometryError:
        return None
    hull = remove_collinear(hull)
    return hull if doubled_signed_area(hull) > 0 else None


def slope_key(a: Point, b: Point) -> tuple[int, Fraction]:
    """Order of a segment's slope; vertical sorts after every finite slope."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    if dx == 0:
        return (1, Fraction(0))
    return (0, Fraction(dy, dx))


def partition_cells(instance: Instance, cx: int, cy: int) -> list[list[Point] | None]:
    minx, miny, maxx, maxy = instance.box
    out = []
    for j in range(cy):
        for i in range(cx):
            box = (
                minx + (maxx - minx) * i // cx,
                miny + (maxy - miny) * j // cy,
                minx + (maxx - minx) * (i + 1) // cx,
                miny + (maxy - miny) * (j + 1) // cy,
            )
            out.append(clip_cell(instance.container, box))
    return out


def deal_copies(instance: Instance, n_cells: int) -> list[list[int]]:
    """Item copies sorted by longest-edge slope, then diameter slope, in equal blocks."""
    copies = []
    for it in instance.items:
        m = it.metrics
        key = (slope_key(*m.longest_edge), slope_key(*m.diameter_endpoints), it.index)
        copies += [key] * it.quantity
    copies.sort()
    out: list[list[int]] = []
    total = len(copies)
    for k in range(n_cells):
        lo, hi = total * k // n_cells, total * (k + 1) // n_cells
        out.append([c[2] for c in copies[lo:hi]])
    return out


def ip_solve(instance: Instance, uniform_per_item: int, sched: RefinementSchedule, rng: random.Random) -> Solution:
    """Uniform sampling, one exact solve, then refinement."""
    cands = sample_uniform(instance, uniform_per_item, rng)
    sol = solve_candidates(instance, cands, sched.limits)
    return refine(instance, sol, sched, rng)


def partition_and_solve(instance: Instance, cfg: PartitionConfig, rng: random.Random) -> Solution:
    cells = partition_cells(instance, cfg.cells_x, cfg.cells_y)
    live = [k for k, c in enumerate(cells) if c is not None]
    dealt = deal_copies(instance, len(live)) if live else []
    placements: list[Placement] = []
    for k, share in zip(live, dealt):
        if not share:
            continue
        counts: dict[int, int] = {}
        for i in share:
            counts[i] = counts.get(i, 0) + 1
        order = sorted(counts)
        sub = Instance.build(
            f"{instance.name}#cell{k}",
            cells[k],  # type: ignore[arg-type]
            [(instance.items[i].vertices, instance.items[i].value, counts[i]) for i in order],
        )
        sol = ip_solve(sub, cfg.uniform_per_item, cfg.schedule, rng)
        placements += [Placement(order[p.item_index], p.translation) for p in sol.placements]
    return Solution(instance.name, tuple(placements))


def auto_partition(instance: Instance, target_copies_per_cell: int = 30) -> PartitionConfig:
    k = max(1, math.ceil(math.sqrt(instance.total_copies / target_copies_per_cell)))
    return PartitionConfig(cells_x=k, cells_y=k)
