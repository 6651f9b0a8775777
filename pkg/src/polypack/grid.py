"""Uniform grid broad phase over the container box."""
from __future__ import annotations

from statistics import median_low
from typing import Iterable

Box = tuple[int, int, int, int]


class Grid:
    """Cells of side ``cell_size`` each listing the placements whose box meets them.

    Membership is conservative: a box touching a cell border is listed in both
    neighbouring cells. Boxes reaching past the grid extent are clamped onto the
    border cells, so queries never miss them.
    """

    def __init__(self, container_box: Box, cell_size: int):
        minx, miny, maxx, maxy = container_box
        if maxx <= minx or maxy <= miny:
            raise ValueError("degenerate container box")
        self.cell_size = max(1, int(cell_size))
        self.origin = (minx, miny)
        self.cols = max(1, -(-(maxx - minx) // self.cell_size))
        self.rows = max(1, -(-(maxy - miny) // self.cell_size))
        self.cells: list[list[int]] = [[] for _ in range(self.cols * self.rows)]

    def _span(self, box: Box) -> tuple[int, int, int, int]:
        ox, oy = self.origin
        cs = self.cell_size
        c0 = min(max((box[0] - ox) // cs, 0), self.cols - 1)
        c1 = min(max((box[2] - ox) // cs, 0), self.cols - 1)
        r0 = min(max((box[1] - oy) // cs, 0), self.rows - 1)
        r1 = min(max((box[3] - oy) // cs, 0), self.rows - 1)
        return c0, c1, r0, r1

    def insert(self, pid: int, box: Box) -> None:
        c0, c1, r0, r1 = self._span(box)
        cells = self.cells
        cols = self.cols
        for r in range(r0, r1 + 1):
            base = r * cols
            for c in range(c0, c1 + 1):
                cells[base + c].append(pid)

    def remove(self, pid: int, box: Box) -> None:
        c0, c1, r0, r1 = self._span(box)
        cells = self.cells
        cols = self.cols
        for r in range(r0, r1 + 1):
            base = r * cols
            for c in range(c0, c1 + 1):
                cell = cells[base + c]
                assert pid in cell, f"placement {pid} missing from cell ({c}, {r})"
                cell.remove(pid)

    def candidates(self, box: Box) -> set[int]:
        c0, c1, r0, r1 = self._span(box)
        out: set[int] = set()
        cells = self.cells
        cols = self.cols
        for r in range(r0, r1 + 1):
            base = r * cols
            for c in range(c0, c1 + 1):
                out.update(cells[base + c])
        return out

    def snapshot(self) -> list[tuple[int, ...]]:
        return [tuple(sorted(c)) for c in self.cells]


def cell_size_for(sizes: Iterable[int]) -> int:
    """Median of the items' larger box sides, at least 1."""
    vals = list(sizes)
    if not vals:
        return 1
    return max(1, int(median_low(vals)))


def grid_new(container_box: Box, item_boxes: Iterable[Box]) -> Grid:
    sizes = [max(b[2] - b[0], b[3] - b[1]) for b in item_boxes]
    return Grid(container_box, cell_size_for(sizes))
