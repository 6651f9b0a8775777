import random

import pytest

from oracles import brute_force_ray
from polypack.generate import generate
from polypack.model import Instance, PackingState, verify
from polypack.push import PushConfig, _round_half, alpha_order, max_translate, push

SQ10 = [(0, 0), (10, 0), (10, 10), (0, 10)]
SQ1 = [(0, 0), (1, 0), (1, 1), (0, 1)]


def box(w, h):
    return [(0, 0), (w, 0), (w, h), (0, h)]


def test_round_half_away_from_zero():
    assert [_round_half(n, 1) for n in (-3, -1, 1, 3, 4)] == [-2, -1, 1, 2, 2]
    assert _round_half(5, 2) == 1 and _round_half(6, 2) == 2 and _round_half(-6, 2) == -2


def test_alpha_order():
    assert alpha_order(PushConfig()) == [0, 1, -1, 2, -2, 3, -3, 4, -4, 5, -5, 6, -6, 7, -7, 8, -8]
    assert alpha_order(PushConfig(alpha_min=0, alpha_max=2)) == [0, 1, 2]
    with pytest.raises(ValueError):
        PushConfig(alpha_min=1)


def test_slide_to_wall():
    inst = Instance.build("w", box(100, 100), [(SQ10, 1, 1)])
    st = PackingState(inst)
    pid = st.place(0, (0, 37))
    assert max_translate(st, pid, (0, -1)) == (0, 0)
    assert st.position(pid) == (0, 0)


def test_slide_to_obstacle():
    inst = Instance.build("o", box(100, 100), [(SQ10, 1, 2)])
    st = PackingState(inst)
    st.place(0, (50, 20))
    pid = st.place(0, (0, 20))
    # strides of 3 stop at 39; the rounded sub-steps (2, 0) then (1, 0) close the gap
    assert max_translate(st, pid, (3, 0)) == (40, 20)
    valid = [x for x in range(0, 91) if st.fits(0, (x, 20), exclude=(pid,))]
    assert max(x for x in valid if x < 50) == 40


def test_exact_reverse_slide_to_touch():
    # sliding back from far right with v = (-3, 0) stops with the faces touching at x = 60
    inst = Instance.build("o", box(100, 100), [(SQ10, 1, 2)])
    st = PackingState(inst)
    st.place(0, (50, 20))
    pid = st.place(0, (90, 20))
    assert max_translate(st, pid, (-3, 0)) == (60, 20)


def test_push_flush_with_bottom():
    inst = Instance.build("p", box(100, 100), [(SQ10, 1, 1)])
    st = PackingState(inst)
    pid = st.place(0, (40, 40))
    p = push(st, pid, (0, -1))
    assert p[1] == 0 and p[1] < 40


def test_push_wedged_in_corner_unchanged():
    inst = Instance.build("c", box(100, 100), [(SQ10, 1, 1)])
    st = PackingState(inst)
    pid = st.place(0, (0, 0))
    for u in [(-1, -1), (-3, -1), (-1, -5), (-2, -7)]:
        assert push(st, pid, u) == (0, 0)


def test_push_zero_direction_rejected():
    inst = Instance.build("c", box(100, 100), [(SQ10, 1, 1)])
    st = PackingState(inst)
    pid = st.place(0, (0, 0))
    with pytest.raises(ValueError):
        push(st, pid, (0, 0))


def test_long_runway_after_rounding():
    # a corridor of slope 1/2; the push ray (3, 2) leaves it quickly but the
    # rounded vector (2, 1) runs down the whole corridor
    inst = Instance.build("runway", [(0, 0), (4000, 2000), (4000, 2006), (0, 6)], [(SQ1, 1, 1)])
    st = PackingState(inst)
    pid = st.place(0, (0, 1))
    trace = []
    before = st.checks
    p = max_translate(st, pid, (3, 2), trace=trace)
    assert ("restart", (2, 1)) in trace
    assert p[0] >= 3990
    assert st.fits(0, p, exclude=(pid,))
    # doubling, not crawling: far fewer probes than the ~2000 unit steps
    assert st.checks - before < 300


def test_sign_flip_of_rounded_vector_aborts():
    # bottom container edge has direction (1, -1); the rounding chain for
    # v = u + 2u' ends in (1, -1), which has negative dot with u
    u = (-6, -5)
    v = (u[0] + 2 * 5, u[1] + 2 * -6)
    assert v == (4, -17)
    inst = Instance.build("flip", [(0, 100), (100, 0), (100, 200), (0, 200)], [(SQ1, 1, 1)])
    st = PackingState(inst)
    pid = st.place(0, (50, 50))
    assert st.fits(0, (51, 49), exclude=(pid,))  # the flipped step would be legal
    trace = []
    p = max_translate(st, pid, v, u, trace=trace)
    assert ("abort", (1, -1)) in trace
    assert p == (50, 50)
    q = push(st, pid, u)
    assert (q[0] - 50) * u[0] + (q[1] - 50) * u[1] >= 0


def _scene(rng, n_items=8):
    inst = generate(rng.choice(["convex", "polyomino"]), n_items, seed=rng.randrange(10**6))
    st = PackingState(inst)
    lo = inst.box
    for _ in range(60):
        i = rng.randrange(len(inst.items))
        pos = (rng.randint(lo[0], lo[2]), rng.randint(lo[1], lo[3]))
        if st.can_place(i, pos):
            st.place(i, pos)
    return inst, st


def test_max_translate_against_ray_scan():
    rng = random.Random(1)
    n = 0
    while n < 300:
        inst, st = _scene(rng)
        if not st.placements:
            continue
        for pid in list(st.placements):
            v = (rng.randint(-9, 9), rng.randint(-9, 9))
            if v == (0, 0):
                continue
            p0 = st.position(pid)
            t = brute_force_ray(st, pid, v, limit=1000)
            f = max_translate(st, pid, v)
            assert st.fits(st.placements[pid][0], f, exclude=(pid,))
            d = (f[0] - p0[0]) * v[0] + (f[1] - p0[1]) * v[1]
            assert d >= t * (v[0] ** 2 + v[1] ** 2)
            n += 1


def test_random_pushes_monotone_and_feasible():
    rng = random.Random(2)
    n = 0
    while n < 500:
        inst, st = _scene(rng)
        for pid in list(st.placements):
            u = (rng.randint(-20, 20), rng.randint(-20, 20))
            if u == (0, 0):
                continue
            p0 = st.position(pid)
            f = push(st, pid, u)
            assert (f[0] - p0[0]) * u[0] + (f[1] - p0[1]) * u[1] >= 0
            assert f == st.position(pid)
            n += 1
        assert verify(inst, st.solution()).feasible


def test_group_push_moves_rigidly():
    inst = Instance.build("g", box(100, 100), [(SQ10, 1, 3)])
    st = PackingState(inst)
    a = st.place(0, (40, 40))
    b = st.place(0, (50, 40))
    st.place(0, (0, 0))
    push(st, [a, b], (0, -1))
    pa, pb = st.position(a), st.position(b)
    assert pb[0] - pa[0] == 10 and pb[1] == pa[1]
    assert pa[1] == 0 or pa[1] == 10
    assert verify(inst, st.solution()).feasible
