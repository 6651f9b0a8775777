"""SVG depiction of a solution: the container outline and one filled path per placement."""
from __future__ import annotations

from typing import Sequence

from .geometry import Point
from .model import Instance, Solution


def item_color(index: int) -> str:
    # Knuth multiplicative hash spreads neighbouring indices over the hue circle
    hue = (index * 2654435761) % 360
    return f"hsl({hue},65%,60%)"


def _path(points: Sequence[Point], t: Point = (0, 0)) -> str:
    tx, ty = t
    pts = [f"{x + tx},{y + ty}" for x, y in points]
    return "M" + " L".join(pts) + " Z"


def render_svg(instance: Instance, solution: Solution) -> str:
    minx, miny, maxx, maxy = instance.box
    w, h = maxx - minx, maxy - miny
    stroke = max(w, h) / 1000
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{minx} {miny} {w} {h}">',
        # flip y so the picture has the usual mathematical orientation
        f'<g transform="matrix(1 0 0 -1 0 {miny + maxy})">',
        f'<path d="{_path(instance.container)}" fill="none" stroke="black" stroke-width="{stroke:g}"/>',
    ]
    for p in solution.placements:
        it = instance.items[p.item_index]
        out.append(
            f'<path d="{_path(it.vertices, p.translation)}" fill="{item_color(p.item_index)}" '
            f'stroke="black" stroke-width="{stroke / 2:g}"/>'
        )
    out += ["</g>", "</svg>", ""]
    return "\n".join(out)


def write_svg(instance: Instance, solution: Solution, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(render_svg(instance, solution))
