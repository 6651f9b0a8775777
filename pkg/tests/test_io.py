import json
import random

import pytest

from polypack.clusters import ClusterConfig, default_graphs, generate_clusters
from polypack.generate import generate
from polypack.greedy import GreedyConfig, greedy_pack
from polypack.io import (
    FormatError,
    instance_from_dict,
    instance_to_dict,
    load_clusters,
    load_instance,
    load_solution,
    save_clusters,
    save_instance,
    save_solution,
    solution_from_dict,
)
from polypack.model import Placement, Solution


def test_instance_round_trip(tmp_path):
    inst = generate("convex", 7, seed=3)
    p = tmp_path / "i.json"
    save_instance(inst, p)
    back = load_instance(p)
    assert instance_to_dict(back) == instance_to_dict(inst)
    d = json.loads(p.read_text())
    assert d["type"] == "cgshop2024_instance" and d["num_items"] == 7


def test_solution_round_trip(tmp_path):
    inst = generate("polyomino", 6, seed=1)
    sol = greedy_pack(inst, GreedyConfig(n_grid_points=100))
    p = tmp_path / "s.json"
    save_solution(sol, p, meta={"value": sol.value(inst)})
    assert load_solution(p) == sol
    d = json.loads(p.read_text())
    assert d["num_included_items"] == len(sol) and d["meta"]["value"] == sol.value(inst)


def test_empty_solution_round_trip(tmp_path):
    p = tmp_path / "e.json"
    save_solution(Solution("x"), p)
    assert load_solution(p) == Solution("x")


def base_instance():
    return {
        "instance_name": "t",
        "container": {"x": [0, 10, 10, 0], "y": [0, 0, 10, 10]},
        "items": [{"x": [0, 1, 1, 0], "y": [0, 0, 1, 1], "value": 2, "quantity": 3}],
    }


@pytest.mark.parametrize(
    "mutate, msg",
    [
        (lambda d: d.pop("items"), "missing field 'items'"),
        (lambda d: d.update(type="other"), "unexpected type"),
        (lambda d: d["container"].update(x=[0, 10, 10]), "different lengths"),
        (lambda d: d["container"].update(x=[0, 10.5, 10, 0]), "list of integers"),
        (lambda d: d["items"][0].pop("value"), "missing field 'value'"),
        (lambda d: d["items"][0].update(quantity="3"), "must be integers"),
        (lambda d: d["items"][0].update(x=True), "list of integers"),
    ],
)
def test_instance_format_errors(mutate, msg):
    d = base_instance()
    mutate(d)
    with pytest.raises(FormatError, match=msg):
        instance_from_dict(d)


def test_instance_from_dict_ok():
    inst = instance_from_dict(base_instance())
    assert inst.items[0].quantity == 3 and inst.name == "t"


def test_invalid_json_and_missing_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(FormatError, match="invalid JSON"):
        load_instance(p)
    with pytest.raises(OSError):
        load_instance(tmp_path / "absent.json")


def test_invalid_geometry_reported_as_format_error(tmp_path):
    d = base_instance()
    d["items"][0]["quantity"] = 0
    p = tmp_path / "g.json"
    p.write_text(json.dumps(d))
    with pytest.raises(FormatError, match=str(p)):
        load_instance(p)


def test_solution_format_errors():
    good = {"instance_name": "t", "item_indices": [0], "x_translations": [1], "y_translations": [2]}
    assert solution_from_dict(good).placements == (Placement(0, (1, 2)),)
    with pytest.raises(FormatError, match="differ in length"):
        solution_from_dict(dict(good, x_translations=[1, 2]))
    with pytest.raises(FormatError, match="missing field"):
        solution_from_dict({"instance_name": "t"})
    with pytest.raises(FormatError):
        solution_from_dict([])


def test_cluster_file_round_trip(tmp_path):
    inst = generate("polyomino", 6, seed=2)
    cfg = ClusterConfig(gauss_sigma=0, max_generation=2)
    rng = random.Random(0)
    pool = generate_clusters(inst, default_graphs(inst, cfg, rng), cfg, rng)
    assert pool
    p = tmp_path / "c.json"
    save_clusters(pool, inst.name, p)
    back = load_clusters(p, inst, cfg)
    assert [(c.members, c.utility) for c in back] == [(c.members, c.utility) for c in pool]
    assert [c.hull for c in back] == [c.hull for c in pool]


def test_cluster_file_errors(tmp_path):
    inst = generate("polyomino", 3, seed=2)
    p = tmp_path / "c.json"

    def check(d, msg):
        p.write_text(json.dumps(d))
        with pytest.raises(FormatError, match=msg):
            load_clusters(p, inst)

    ok = {"format": "polypack-clusters", "version": 1, "instance_name": inst.name, "clusters": []}
    p.write_text(json.dumps(ok))
    assert load_clusters(p, inst) == []
    check(dict(ok, format="x"), "not a cluster file")
    check(dict(ok, version=2), "unsupported")
    check(dict(ok, instance_name="other"), "is for instance")
    check(dict(ok, clusters=[{"members": [[9, 0, 0]], "utility": 1}]), "out of range")
    check(dict(ok, clusters=[{"members": [[0, 0]], "utility": 1}]), "malformed")
