"""JSON instance/solution files in the challenge layout, plus versioned cluster pools."""
from __future__ import annotations

import json
import os
from typing import Any, Sequence

from .clusters import Cluster, ClusterConfig, cluster_from_members
from .model import Instance, InstanceError, Placement, Solution

INSTANCE_TYPE = "cgshop2024_instance"
SOLUTION_TYPE = "cgshop2024_solution"
CLUSTER_FORMAT = "polypack-clusters"
CLUSTER_VERSION = 1


class FormatError(ValueError):
    """A file parsed as JSON but does not have the expected structure."""


def _read_json(path: str | os.PathLike) -> Any:
    with open(path, encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise FormatError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from None


def _write_json(path: str | os.PathLike, data: Any) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=1)
        f.write("\n")


def _int_list(v: Any, what: str) -> list[int]:
    if not isinstance(v, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in v):
        raise FormatError(f"{what} must be a list of integers")
    return v


def _polygon(obj: Any, what: str) -> list[tuple[int, int]]:
    if not isinstance(obj, dict) or "x" not in obj or "y" not in obj:
        raise FormatError(f"{what} needs 'x' and 'y' arrays")
    xs = _int_list(obj["x"], f"{what}.x")
    ys = _int_list(obj["y"], f"{what}.y")
    if len(xs) != len(ys):
        raise FormatError(f"{what}: x and y have different lengths")
    return list(zip(xs, ys))


def instance_from_dict(d: Any) -> Instance:
    if not isinstance(d, dict):
        raise FormatError("instance must be a JSON object")
    if d.get("type", INSTANCE_TYPE) != INSTANCE_TYPE:
        raise FormatError(f"unexpected type {d.get('type')!r}")
    for k in ("instance_name", "container", "items"):
        if k not in d:
            raise FormatError(f"missing field {k!r}")
    if not isinstance(d["items"], list):
        raise FormatError("items must be a list")
    cont = _polygon(d["container"], "container")
    items = []
    for i, it in enumerate(d["items"]):
        pts = _polygon(it, f"item {i}")
        try:
            value, qty = it["value"], it["quantity"]
        except KeyError as e:
            raise FormatError(f"item {i}: missing field {e.args[0]!r}") from None
        if not isinstance(value, int) or not isinstance(qty, int):
            raise FormatError(f"item {i}: value and quantity must be integers")
        items.append((pts, value, qty))
    return Instance.build(str(d["instance_name"]), cont, items)


def instance_to_dict(inst: Instance) -> dict:
    return {
        "type": INSTANCE_TYPE,
        "instance_name": inst.name,
        "num_items": len(inst.items),
        "container": {"x": [p[0] for p in inst.container], "y": [p[1] for p in inst.container]},
        "items": [
            {
                "x": [p[0] for p in it.vertices],
                "y": [p[1] for p in it.vertices],
                "value": it.value,
                "quantity": it.quantity,
            }
            for it in inst.items
        ],
    }


def load_instance(path: str | os.PathLike) -> Instance:
    d = _read_json(path)
    try:
        return instance_from_dict(d)
    except InstanceError as e:
        raise FormatError(f"{path}: {e}") from None


def save_instance(inst: Instance, path: str | os.PathLike) -> None:
    _write_json(path, instance_to_dict(inst))


def solution_from_dict(d: Any) -> Solution:
    if not isinstance(d, dict):
        raise FormatError("solution must be a JSON object")
    if d.get("type", SOLUTION_TYPE) != SOLUTION_TYPE:
        raise FormatError(f"unexpected type {d.get('type')!r}")
    for k in ("instance_name", "item_indices", "x_translations", "y_translations"):
        if k not in d:
            raise FormatError(f"missing field {k!r}")
    idx = _int_list(d["item_indices"], "item_indices")
    xs = _int_list(d["x_translations"], "x_translations")
    ys = _int_list(d["y_translations"], "y_translations")
    if not len(idx) == len(xs) == len(ys):
        raise FormatError("item_indices, x_translations and y_translations differ in length")
    return Solution(str(d["instance_name"]), tuple(Placement(i, (x, y)) for i, x, y in zip(idx, xs, ys)))


def solution_to_dict(sol: Solution, meta: dict | None = None) -> dict:
    d = {
        "type": SOLUTION_TYPE,
        "instance_name": sol.instance_name,
        "num_included_items": len(sol.placements),
        "meta": meta or {},
        "item_indices": [p.item_index for p in sol.placements],
        "x_translations": [p.translation[0] for p in sol.placements],
        "y_translations": [p.translation[1] for p in sol.placements],
    }
    return d


def load_solution(path: str | os.PathLike) -> Solution:
    return solution_from_dict(_read_json(path))


def save_solution(sol: Solution, path: str | os.PathLike, meta: dict | None = None) -> None:
    _write_json(path, solution_to_dict(sol, meta))


def clusters_to_dict(pool: Sequence[Cluster], instance_name: str) -> dict:
    return {
        "format": CLUSTER_FORMAT,
        "version": CLUSTER_VERSION,
        "instance_name": instance_name,
        "clusters": [
            {"members": [[i, x, y] for i, (x, y) in c.members], "utility": c.utility}
            for c in pool
        ],
    }


def clusters_from_dict(d: Any, instance: Instance, cfg: ClusterConfig | None = None) -> list[Cluster]:
    if not isinstance(d, dict) or d.get("format") != CLUSTER_FORMAT:
        raise FormatError("not a cluster file")
    if d.get("version") != CLUSTER_VERSION:
        raise FormatError(f"unsupported cluster file version {d.get('version')!r}")
    if d.get("instance_name") != instance.name:
        raise FormatError(f"cluster file is for instance {d.get('instance_name')!r}, not {instance.name!r}")
    out = []
    for k, c in enumerate(d.get("clusters", [])):
        try:
            members = [(int(i), (int(x), int(y))) for i, x, y in c["members"]]
            util = float(c["utility"])
        except (KeyError, TypeError, ValueError):
            raise FormatError(f"cluster {k}: malformed entry") from None
        if not members or any(not 0 <= i < len(instance.items) for i, _ in members):
            raise FormatError(f"cluster {k}: item index out of range")
        out.append(cluster_from_members(instance, members, util, cfg))
    return out


def save_clusters(pool: Sequence[Cluster], instance_name: str, path: str | os.PathLike) -> None:
    _write_json(path, clusters_to_dict(pool, instance_name))


def load_clusters(path: str | os.PathLike, instance: Instance, cfg: ClusterConfig | None = None) -> list[Cluster]:
    return clusters_from_dict(_read_json(path), instance, cfg)
