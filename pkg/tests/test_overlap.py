import random

import pytest
from hypothesis import given, strategies as st

from degenerate_cases import CASES
from oracles import inside_by_clipping, naive_overlap, random_convex, random_polyomino, random_star
from polypack.geometry import GeometryError, is_convex, remove_collinear
from polypack.overlap import decompose_chains, inside_container, items_overlap, reconstruct_boundary, require_convex

SQ1 = [(0, 0), (1, 0), (1, 1), (0, 1)]


def test_convex_has_two_chains():
    rng = random.Random(1)
    for _ in range(200):
        p = random_convex(rng, rng.randint(3, 30), 1000)
        assert len(decompose_chains(p).chains) == 2


def test_unit_square_chains():
    cs = decompose_chains(SQ1)
    assert len(cs.chains) == 2
    bottom, top = cs.chains
    assert bottom.points == ((0, 0), (1, 0), (1, 1)) and bottom.item_above
    assert top.points == ((0, 0), (0, 1), (1, 1)) and not top.item_above


def _walk(poly):
    n = len(poly)
    s = min(range(n), key=lambda i: poly[i])
    return [poly[(s + k) % n] for k in range(n)]


def test_chains_monotone_and_reconstruct():
    L = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]
    cs = decompose_chains(L)
    assert reconstruct_boundary(cs) == _walk(L)
    rng = random.Random(2)
    for _ in range(300):
        p = random_star(rng, rng.randint(3, 25), 1000) if rng.random() < 0.5 else random_polyomino(rng, rng.randint(1, 8), 10)
        cs = decompose_chains(p)
        for ch in cs.chains:
            assert list(ch.points) == sorted(ch.points)
            xs = [q[0] for q in ch.points]
            assert ch.box == (min(xs), min(q[1] for q in ch.points), max(xs), max(q[1] for q in ch.points))
        assert reconstruct_boundary(cs) == _walk(p)


def test_spec_examples():
    a = decompose_chains(SQ1)
    assert items_overlap(a, (0, 0), a, (1, 0)) is False
    assert items_overlap(a, (0, 0), a, (0, 0)) is True


@pytest.mark.parametrize("name,A,pa,B,pb,expected", CASES, ids=[c[0] for c in CASES])
def test_degenerate_suite(name, A, pa, B, pb, expected):
    a, b = decompose_chains(A), decompose_chains(B)
    assert naive_overlap(A, pa, B, pb) is expected, "label disagrees with the oracle"
    assert items_overlap(a, pa, b, pb) is expected
    assert items_overlap(b, pb, a, pa) is expected


def test_degenerate_suite_size():
    assert len(CASES) >= 20


def _shape(rng):
    r = rng.random()
    if r < 0.35:
        return random_convex(rng, rng.randint(3, 12), 12)
    if r < 0.7:
        return random_star(rng, rng.randint(3, 12), 10)
    return random_polyomino(rng, rng.randint(1, 6), 3)


def test_random_small_coordinates_against_oracle():
    # small coordinates force many touching and collinear contacts
    rng = random.Random(3)
    for _ in range(4000):
        A, B = _shape(rng), _shape(rng)
        pa = (rng.randint(-3, 3), rng.randint(-3, 3))
        pb = (rng.randint(-12, 12), rng.randint(-12, 12))
        a, b = decompose_chains(A), decompose_chains(B)
        assert items_overlap(a, pa, b, pb) == naive_overlap(A, pa, B, pb), (A, pa, B, pb)


poly_st = st.builds(lambda seed: _shape(random.Random(seed)), st.integers(0, 10**9))
off = st.tuples(st.integers(-15, 15), st.integers(-15, 15))


@given(poly_st, off, poly_st, off, off)
def test_symmetry_and_translation_invariance(A, pa, B, pb, d):
    a, b = decompose_chains(A), decompose_chains(B)
    r = items_overlap(a, pa, b, pb)
    assert r == items_overlap(b, pb, a, pa)
    assert r == items_overlap(a, (pa[0] + d[0], pa[1] + d[1]), b, (pb[0] + d[0], pb[1] + d[1]))


@given(poly_st, off, poly_st, off)
def test_disjoint_boxes_never_overlap(A, pa, B, pb):
    a, b = decompose_chains(A), decompose_chains(B)
    ba = (a.box[0] + pa[0], a.box[1] + pa[1], a.box[2] + pa[0], a.box[3] + pa[1])
    bb = (b.box[0] + pb[0], b.box[1] + pb[1], b.box[2] + pb[0], b.box[3] + pb[1])
    if ba[2] <= bb[0] or bb[2] <= ba[0] or ba[3] <= bb[1] or bb[3] <= ba[1]:
        assert not items_overlap(a, pa, b, pb)
        assert not naive_overlap(A, pa, B, pb)


def test_inside_container_examples():
    cont = [(0, 0), (10, 0), (10, 10), (0, 10)]
    s = decompose_chains(SQ1)
    assert inside_container(s, (0, 0), cont)
    assert not inside_container(s, (10, 0), cont)
    assert inside_container(s, (9, 9), cont)


def test_inside_container_against_clipping():
    rng = random.Random(4)
    for _ in range(100):
        cont = random_convex(rng, rng.randint(3, 12), 200)
        for _ in range(100):
            item = _shape(rng)
            pos = (rng.randint(-20, 200), rng.randint(-20, 200))
            assert inside_container(decompose_chains(item), pos, cont) == inside_by_clipping(item, pos, cont)


def test_require_convex():
    require_convex([(0, 0), (4, 0), (4, 4), (0, 4)])
    with pytest.raises(GeometryError):
        require_convex([(0, 0), (4, 0), (4, 4), (2, 1), (0, 4)])
