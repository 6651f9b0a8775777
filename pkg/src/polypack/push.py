"""Translate-along-ray and push primitives.

A mover is one placement id or a group of ids moved rigidly (clusters). The
translation along ``v`` grows by powers of two until the mover leaves the
container, then descends through the exponents; below exponent 0 the step is
``round(2^k v)``. A rounded step that changes direction restarts the search
with that step as the new ray, so an unexpectedly long runway is covered by
doubling rather than crawled. A rounded step with non-positive dot product
against the push direction ends the ray.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .geometry import Point
from .model import PackingState

MAX_ACCEPTED_MOVES = 1_000_000


@dataclass
class PushConfig:
    alpha_min: int = -8
    alpha_max: int = 8
    max_stall_directions: int = 17

    def __post_init__(self):
        if not self.alpha_min <= 0 <= self.alpha_max:
            raise ValueError("alpha range must contain 0")


def _round_half(num: int, den_exp: int) -> int:
    """round(num / 2**den_exp), halves away from zero."""
    d = 1 << den_exp
    if num >= 0:
        return (2 * num + d) // (2 * d)
    return -((-2 * num + d) // (2 * d))


class Mover:
    """A rigid set of placements in a state, tested and moved together."""

    def __init__(self, state: PackingState, ids: int | Sequence[int]):
        self.state = state
        self.ids = (ids,) if isinstance(ids, int) else tuple(ids)
        self.members = [(pid, *state.placements[pid]) for pid in self.ids]
        # reference position: the first member's translation
        self.origin = self.members[0][2]

    @property
    def position(self) -> Point:
        return self.state.position(self.ids[0])

    def _offsets(self, pos: Point):
        dx = pos[0] - self.origin[0]
        dy = pos[1] - self.origin[1]
        for pid, item, (tx, ty) in self.members:
            yield pid, item, (tx + dx, ty + dy)

    def inside(self, pos: Point) -> bool:
        inst = self.state.instance
        return all(inst.fits_container(item, t) for _, item, t in self._offsets(pos))

    def valid(self, pos: Point) -> bool:
        st = self.state
        ids = self.ids
        return all(st.fits(item, t, exclude=ids) for _, item, t in self._offsets(pos))

    def move_to(self, pos: Point) -> None:
        for pid, _, t in self._offsets(pos):
            self.state.move(pid, t)


def max_translate(
    state: PackingState,
    placement: int | Sequence[int] | Mover,
    v: Point,
    u: Point | None = None,
    trace: list | None = None,
) -> Point:
    """Slide the mover as far as the jump procedure reaches along ``v``.

    ``u`` is the governing push direction (defaults to ``v``). The state is
    updated in place and the final reference position returned.
    """
    mover = placement if isinstance(placement, Mover) else Mover(state, placement)
    if v == (0, 0):
        return mover.position
    if u is None:
        u = v
    ux, uy = u
    p = mover.position
    start = p
    vx, vy = v
    while True:
        while True:
            # smallest k >= 0 with p + 2^k v outside the container
            k = 0
            while mover.inside((p[0] + (vx << k), p[1] + (vy << k))):
                k += 1
            for e in range(k - 1, -1, -1):
                q = (p[0] + (vx << e), p[1] + (vy << e))
                if mover.valid(q):
                    p = q
            if k == 0 or not mover.valid((p[0] + vx, p[1] + vy)):
                break
        # sub-unit steps along rounded vectors
        restarted = False
        e = 1
        while True:
            wx, wy = _round_half(vx, e), _round_half(vy, e)
            if wx == 0 and wy == 0:
                break
            if ux * wx + uy * wy <= 0:
                if trace is not None:
                    trace.append(("abort", (wx, wy)))
                break
            if wx * vy - wy * vx != 0 or wx * vx + wy * vy < 0:
                if trace is not None:
                    trace.append(("restart", (wx, wy)))
                vx, vy = wx, wy
                restarted = True
                break
            q = (p[0] + wx, p[1] + wy)
            if mover.valid(q):
                p = q
            e += 1
        if not restarted:
            break
    if p != start:
        mover.move_to(p)
    return p


def push(
    state: PackingState,
    placement: int | Sequence[int],
    u: Point,
    cfg: PushConfig | None = None,
    trace: list | None = None,
) -> Point:
    """Push along ``u``, sliding over the fan v = u + alpha * u'.

    A move is accepted only when it strictly increases the dot product of the
    position with ``u``; the sweep restarts at alpha = 0 after every accepted
    move and ends after ``max_stall_directions`` consecutive failures.
    """
    cfg = cfg or PushConfig()
    if u == (0, 0):
        raise ValueError("push direction must be non-zero")
    mover = Mover(state, placement)
    ux, uy = u
    px, py = -uy, ux
    alphas = alpha_order(cfg)
    p = mover.position
    stall = 0
    idx = 0
    accepted = 0
    while stall < cfg.max_stall_directions:
        a = alphas[idx % len(alphas)]
        v = (ux + a * px, uy + a * py)
        q = max_translate(state, mover, v, u, trace)
        if (q[0] - p[0]) * ux + (q[1] - p[1]) * uy > 0:
            p = q
            stall = 0
            idx = 0
            accepted += 1
            if accepted > MAX_ACCEPTED_MOVES:
                raise RuntimeError("push exceeded its move ceiling")
        else:
            stall += 1
            idx += 1
    return p


def alpha_order(cfg: PushConfig) -> list[int]:
    out = [0]
    for a in range(1, max(-cfg.alpha_min, cfg.alpha_max) + 1):
        if a <= cfg.alpha_max:
            out.append(a)
        if -a >= cfg.alpha_min:
            out.append(-a)
    return out

