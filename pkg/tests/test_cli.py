import json
import subprocess
import sys

import pytest

from polypack.cli import main, read_config
from polypack.generate import generate
from polypack.greedy import GreedyConfig
from polypack.io import load_instance, load_solution, save_instance, save_solution
from polypack.model import Placement, Solution, verify
from polypack.local_search import LsConfig
from polypack.pipeline import PipelineSpec, run_once, solve


@pytest.fixture
def inst_file(tmp_path):
    p = tmp_path / "inst.json"
    assert main(["gen", "convex", "--n", "8", "--seed", "3", "--out", str(p)]) == 0
    return p


def test_gen_and_solve_and_verify(tmp_path, inst_file, capsys):
    out = tmp_path / "sol.json"
    trace = tmp_path / "t.csv"
    rc = main(["solve", str(inst_file), "--grid-points", "100", "--ls-iterations", "5", "--out", str(out), "--trace", str(trace)])
    assert rc == 0
    line = capsys.readouterr().out.strip().splitlines()[-1]
    assert line.startswith("value=") and "seed=0" in line
    sol = load_solution(out)
    inst = load_instance(inst_file)
    assert verify(inst, sol).feasible
    assert json.loads(out.read_text())["meta"]["value"] == sol.value(inst)
    assert trace.read_text().splitlines()[0] == "elapsed,iteration,best_value"
    assert len(trace.read_text().splitlines()) == 7
    assert main(["verify", str(inst_file), str(out)]) == 0
    svg = tmp_path / "s.svg"
    assert main(["render", str(inst_file), str(out), str(svg)]) == 0
    assert svg.read_text().count("<path") == len(sol) + 1


def test_verify_infeasible_exit_code(tmp_path, inst_file):
    inst = load_instance(inst_file)
    bad = Solution(inst.name, (Placement(0, (10**6, 10**6)),))
    p = tmp_path / "bad.json"
    save_solution(bad, p)
    assert main(["verify", str(inst_file), str(p)]) == 1


def test_io_and_argument_errors(tmp_path, inst_file):
    assert main(["solve", str(tmp_path / "absent.json")]) == 2
    assert main(["solve", str(inst_file), "--push-strategy", "7"]) == 2
    assert main([]) == 2
    assert main(["gen", "tiling", "--n", "0", "--out", str(tmp_path / "x.json")]) == 2
    junk = tmp_path / "junk.json"
    junk.write_text("[1, 2")
    assert main(["verify", str(inst_file), str(junk)]) == 2
    sol = tmp_path / "s.json"
    save_solution(Solution("x", (Placement(99, (0, 0)),)), sol)
    assert main(["render", str(inst_file), str(sol), str(tmp_path / "o.svg")]) == 2
    assert main(["--version"]) == 0


def test_config_file_and_override(tmp_path, inst_file, capsys):
    conf = tmp_path / "run.conf"
    conf.write_text("# budgets\ngrid-points = 50\nseed = 5\nls_iterations = 0\n")
    assert read_config(str(conf)) == {"grid_points": "50", "seed": "5", "ls_iterations": "0"}
    assert main(["solve", str(inst_file), "--config", str(conf)]) == 0
    assert "seed=5" in capsys.readouterr().out
    assert main(["solve", str(inst_file), "--config", str(conf), "--seed", "9"]) == 0
    assert "seed=9" in capsys.readouterr().out
    conf.write_text("colour = red\n")
    assert main(["solve", str(inst_file), "--config", str(conf)]) == 2
    conf.write_text("push_strategy = 9\n")
    assert main(["solve", str(inst_file), "--config", str(conf)]) == 2
    conf.write_text("grid_points = many\n")
    assert main(["solve", str(inst_file), "--config", str(conf)]) == 2
    conf.write_text("just a line\n")
    assert main(["solve", str(inst_file), "--config", str(conf)]) == 2


def test_replicas_deterministic(tmp_path, inst_file):
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        rc = main(["solve", str(inst_file), "--grid-points", "80", "--ls-iterations", "3",
                   "--replicas", "4", "--seed", "7", "--out", str(out)])
        assert rc == 0
        outs.append(json.loads(out.read_text()))
    assert outs[0] == outs[1]
    assert 7 <= outs[0]["meta"]["seed"] <= 10


def test_replicas_pick_best():
    inst = generate("convex", 6, seed=1)
    spec = PipelineSpec(greedy=GreedyConfig(n_grid_points=60), seed=3, replicas=3, workers=1)
    best, runs = solve(inst, spec)
    assert [r.seed for r in runs] == [3, 4, 5]
    assert best.value == max(r.value for r in runs)
    assert best.seed == min(r.seed for r in runs if r.value == best.value)


def test_ip_init_and_from_solution(tmp_path, capsys):
    p = tmp_path / "i.json"
    save_instance(generate("polyomino", 10, seed=2), p)
    out = tmp_path / "ip.json"
    assert main(["solve", str(p), "--init", "ip", "--ip-per-item", "8", "--ip-rounds", "1", "--out", str(out)]) == 0
    inst = load_instance(p)
    first = load_solution(out)
    assert verify(inst, first).feasible
    out2 = tmp_path / "more.json"
    assert main(["solve", str(p), "--from-solution", str(out), "--grid-points", "80",
                 "--ls-iterations", "4", "--out", str(out2)]) == 0
    assert load_solution(out2).value(inst) >= first.value(inst)


def test_clusters_and_export_lp(tmp_path, capsys):
    p = tmp_path / "i.json"
    save_instance(generate("polyomino", 5, seed=3), p)
    cf = tmp_path / "c.json"
    assert main(["clusters", str(p), str(cf), "--generations", "2"]) == 0
    assert main(["solve", str(p), "--cluster-file", str(cf), "--grid-points", "80", "--generations", "2"]) == 0
    lp, mp = tmp_path / "m.lp", tmp_path / "map.json"
    assert main(["export-lp", str(p), str(lp), "--per-item", "4", "--map", str(mp)]) == 0
    text = lp.read_text()
    assert text.startswith("\\") and text.endswith("End\n")
    assert all(len(v) == 3 for v in json.loads(mp.read_text()).values())
    assert main(["export-lp", str(p), str(tmp_path / "nodir" / "m.lp")]) == 2


def test_pipeline_rejects_bad_settings():
    with pytest.raises(ValueError):
        PipelineSpec(init="magic")
    with pytest.raises(ValueError):
        PipelineSpec(init="load")
    with pytest.raises(ValueError):
        PipelineSpec(replicas=0)


def test_run_once_with_ls_is_monotone():
    inst = generate("convex", 8, seed=6)
    spec = PipelineSpec(greedy=GreedyConfig(n_grid_points=80), ls=LsConfig(time_limit_seconds=None, iterations=4))
    r = run_once(inst, spec, 2)
    assert r.value >= r.initial_value and verify(inst, r.solution).feasible


def test_module_entry_point(tmp_path):
    p = tmp_path / "t.json"
    r = subprocess.run([sys.executable, "-m", "polypack", "gen", "tiling", "--n", "2", "--out", str(p)],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "4 copies" in r.stdout
