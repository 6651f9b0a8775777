"""Corruption generator with an independently computed ground truth."""
from __future__ import annotations

import random
from collections import Counter

from oracles import inside_by_clipping, naive_overlap
from polypack.model import Instance, Placement, Solution


def truth(instance: Instance, sol: Solution) -> set:
    """Every violation of ``sol``, recomputed with the brute-force oracles only."""
    out = set()
    pl = list(sol.placements)
    for k, p in enumerate(pl):
        if not inside_by_clipping(instance.items[p.item_index].vertices, p.translation, instance.container):
            out.add(("outside", k))
    for i, c in Counter(p.item_index for p in pl).items():
        if c > instance.items[i].quantity:
            out.add(("quantity", i))
    for a in range(len(pl)):
        A = instance.items[pl[a].item_index]
        ta = pl[a].translation
        for b in range(a + 1, len(pl)):
            B = instance.items[pl[b].item_index]
            tb = pl[b].translation
            if (A.box[2] + ta[0] <= B.box[0] + tb[0] or B.box[2] + tb[0] <= A.box[0] + ta[0]
                    or A.box[3] + ta[1] <= B.box[1] + tb[1] or B.box[3] + tb[1] <= A.box[1] + ta[1]):
                continue
            if naive_overlap(A.vertices, ta, B.vertices, tb):
                out.add(("overlap", a, b))
    return out


def reported(report) -> set:
    out = set()
    for v in report.violations:
        if v["kind"] == "outside":
            out.add(("outside", v["placement"]))
        elif v["kind"] == "quantity":
            out.add(("quantity", v["item_index"]))
        elif v["kind"] == "overlap":
            out.add(("overlap", *v["placements"]))
        else:
            out.add((v["kind"],))
    return out


def inject_overlap(instance: Instance, sol: Solution, rng: random.Random) -> tuple[Solution, tuple]:
    pl = list(sol.placements)
    k, j = rng.sample(range(len(pl)), 2)
    i, t = pl[k].item_index, pl[k].translation
    it = instance.items[i]
    for d in [(0, 0), (1, 0), (0, 1), (-1, 0), (0, -1)][: rng.randint(1, 5)][::-1]:
        t2 = (t[0] + d[0], t[1] + d[1])
        if naive_overlap(it.vertices, t, it.vertices, t2):
            break
    pl[j] = Placement(i, t2)
    return Solution(sol.instance_name, tuple(pl)), ("overlap", min(j, k), max(j, k))


def escape_container(instance: Instance, sol: Solution, rng: random.Random) -> tuple[Solution, tuple]:
    pl = list(sol.placements)
    k = rng.randrange(len(pl))
    i, t = pl[k].item_index, pl[k].translation
    verts = instance.items[i].vertices
    dirs = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)]
    rng.shuffle(dirs)
    d = dirs[0]
    s = 1
    while inside_by_clipping(verts, (t[0] + s * d[0], t[1] + s * d[1]), instance.container):
        s += 1
    # first escaping step: the item pokes out by at most one unit per axis
    pl[k] = Placement(i, (t[0] + s * d[0], t[1] + s * d[1]))
    return Solution(sol.instance_name, tuple(pl)), ("outside", k)


def exceed_quantity(instance: Instance, sol: Solution, rng: random.Random) -> tuple[Solution, tuple]:
    pl = list(sol.placements)
    counts = Counter(p.item_index for p in pl)
    i = rng.randrange(len(instance.items))
    lo = instance.translation_range(i)
    while counts[i] <= instance.items[i].quantity:
        pl.append(Placement(i, (rng.randint(lo[0], max(lo[0], lo[2])), rng.randint(lo[1], max(lo[1], lo[3])))))
        counts[i] += 1
    return Solution(sol.instance_name, tuple(pl)), ("quantity", i)


CORRUPTIONS = {"overlap": inject_overlap, "escape": escape_container, "quantity": exceed_quantity}
