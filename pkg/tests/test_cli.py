import json

import pytest

from bnpsched.cli import EXIT_BUDGET, EXIT_OK, EXIT_USAGE, main, parse_sizes
from bnpsched.instance import GenConfig, generate, save
from bnpsched.report import RunRecord, read_records, summarize, write_records


def record(**kw):
    base = dict(instance_id="a", n=10, m=2, seed=1, algorithm="dfs", objective=100, lb=99.5,
                gap_lb_pct=0.5025, gap_sched_pct=3.0, nodes_explored=3, columns_generated=40,
                wall_ms=12.5, lanes=1, workers=0, strategy="serial")
    base.update(kw)
    return RunRecord(**base)


def test_parse_sizes():
    assert parse_sizes("100/10, 100/20") == [(100, 10), (100, 20)]
    assert parse_sizes("300/30..300/60") == [(300, 30), (300, 45), (300, 60)]
    assert len(parse_sizes("full")) == 7


def test_bad_sizes_exit_usage(tmp_path):
    assert main(["generate", "--sizes", "10x2", "--out", str(tmp_path)]) == EXIT_USAGE


def test_generate_is_deterministic(tmp_path):
    for d in ("a", "b"):
        assert main(["generate", "--sizes", "6/2", "--count", "2", "--seed", "5", "--out", str(tmp_path / d)]) == EXIT_OK
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert len(names) == 2
    for name in names:
        assert (tmp_path / "a" / name).read_text() == (tmp_path / "b" / name).read_text()


def test_solve_writes_rows(tmp_path):
    save(generate(GenConfig(n=6, m=2, seed=3)), tmp_path / "i.json")
    out = tmp_path / "r.csv"
    assert main(["solve", "--instance", str(tmp_path / "i.json"), "--algo", "both", "--results", str(out)]) == EXIT_OK
    assert main(["solve", "--instance", str(tmp_path / "i.json"), "--algo", "oracle", "--results", str(out)]) == EXIT_OK
    rows = read_records(out)
    by = {r.algorithm: r for r in rows}
    assert set(by) == {"sched", "dfs", "oracle"}
    assert by["dfs"].lb <= by["oracle"].objective <= by["dfs"].objective <= by["sched"].objective


def test_solve_budget_exit(tmp_path):
    inst = generate(GenConfig(n=6, m=2, p_range=(1, 5), s_range=(0, 20), prob=1.0, seed=11))
    save(inst, tmp_path / "i.json")
    code = main(["solve", "--instance", str(tmp_path / "i.json"), "--algo", "dfs", "--node-budget", "1"])
    assert code == EXIT_BUDGET


def test_missing_instance_exit_usage(tmp_path):
    assert main(["solve", "--instance", str(tmp_path / "none.json")]) == EXIT_USAGE


def test_malformed_instance_exit_usage(tmp_path):
    (tmp_path / "bad.json").write_text(json.dumps({"n": 1}))
    assert main(["solve", "--instance", str(tmp_path / "bad.json")]) == EXIT_USAGE


def test_unknown_command():
    assert main(["frobnicate"]) == EXIT_USAGE


def test_csv_round_trip(tmp_path):
    rows = [record(), record(instance_id="b", objective=None, lb=None, status="budget", serial_ms=1.25)]
    path = write_records(tmp_path / "r.csv", rows)
    assert read_records(path) == rows


def test_bench(tmp_path):
    path = write_records(tmp_path / "r.csv", [record(wall_ms=10.0, serial_ms=2.0), record(wall_ms=20.0, serial_ms=4.0),
                                              record(lanes=2, wall_ms=9.0)])
    assert main(["bench", "--results", str(path), "--out", str(tmp_path / "out")]) == EXIT_OK
    summary = (tmp_path / "out" / "summary.csv").read_text().splitlines()
    assert len(summary) == 3
    s = summarize(read_records(path))
    assert s[0]["mean_wall_ms"] == 15.0
    assert (tmp_path / "out" / "lanes_runtime.dat").exists()


def test_bench_rejects_empty(tmp_path):
    path = tmp_path / "r.csv"
    write_records(path, [])
    assert main(["bench", "--results", str(path), "--out", str(tmp_path / "o")]) == EXIT_USAGE
    with pytest.raises(ValueError):
        summarize([])
