import json
from dataclasses import replace

import numpy as np
import pytest

from bnpsched.instance import (
    GenConfig, Instance, InstanceError, from_dict, generate, horizon, load, save, to_dict, validate,
)

from conftest import tiny


def test_generate_default_ranges():
    inst = generate(GenConfig(n=300, m=30, seed=1))
    elig = inst.elig[:, 1:]
    p = inst.p[:, 1:][elig]
    assert p.min() >= 10 and p.max() <= 100
    s = inst.s[:, :, 1:]
    assert s.min() >= 0 and s.max() <= 10
    assert inst.w[1:].min() >= 1 and inst.w[1:].max() <= 10
    assert elig.any(axis=0).all()
    assert validate(inst) == []


def test_generate_single_forced():
    inst = generate(GenConfig(n=1, m=1, prob=1.0, seed=0))
    assert inst.elig[0, 1]
    assert validate(inst) == []


def test_generate_deterministic(tmp_path):
    cfg = GenConfig(n=20, m=4, seed=42)
    a = save(generate(cfg), tmp_path / "a.json").read_bytes()
    b = save(generate(cfg), tmp_path / "b.json").read_bytes()
    assert a == b


def test_generate_repairs_eligibility():
    # probability so small that almost every job needs repair
    inst = generate(GenConfig(n=50, m=5, prob=1e-6, seed=3))
    assert (inst.elig[:, 1:].sum(axis=0) == 1).all()


@pytest.mark.parametrize("cfg", [
    GenConfig(n=0, m=1),
    GenConfig(n=1, m=1, p_range=(5, 4)),
    GenConfig(n=1, m=1, w_range=(0, 3)),
    GenConfig(n=1, m=1, s_range=(-1, 3)),
    GenConfig(n=1, m=1, prob=0.0),
    GenConfig(n=1, m=1, prob=1.5),
])
def test_generate_rejects_bad_config(cfg):
    with pytest.raises(InstanceError):
        generate(cfg)


def test_distribution_mean_within_three_standard_errors():
    inst = generate(GenConfig(n=200, m=60, prob=1.0, seed=11))
    p = inst.p[:, 1:].ravel().astype(float)
    assert p.size >= 10_000
    se = np.sqrt(((100 - 10 + 1) ** 2 - 1) / 12 / p.size)
    assert abs(p.mean() - 55.0) <= 3 * se


def test_validate_flags_job_without_machine():
    inst = tiny(w=(1, 1, 1), p=((5, 5, 5),), elig=((True, True, False),))
    diags = validate(inst)
    assert len(diags) == 1 and "job 3" in diags[0]


def test_validate_flags_weight():
    inst = tiny(w=(1, 0), p=((5, 5),))
    diags = validate(inst)
    assert len(diags) == 1 and "job 2" in diags[0] and "weight" in diags[0]


def test_validate_valid():
    assert validate(tiny()) == []


def test_horizon_single(one_job):
    assert horizon(one_job) == 12


def test_horizon_two_jobs_dominates_sequences():
    s = np.full((1, 3, 2), 2)
    s[0, 1, 0] = 0
    s[0, 2, 1] = 0
    inst = tiny(w=(1, 1), p=((10, 5),), s=s)
    assert horizon(inst) == 19
    from bnpsched.column import evaluate
    assert max(evaluate(inst, 0, q).makespan for q in ([1, 2], [2, 1])) <= 19


def test_horizon_ignores_idle_machine():
    inst = tiny(w=(1,), p=((10,), (7,)), s=[[[2], [0]], [[1], [0]]], elig=((True,), (False,)))
    assert horizon(inst) == 12


def test_round_trip(tmp_path):
    inst = generate(GenConfig(n=12, m=3, seed=5))
    assert load(save(inst, tmp_path / "x.json")) == inst


def test_missing_setup_entry(tmp_path):
    d = to_dict(generate(GenConfig(n=3, m=2, seed=0)))
    d["setup"][1][2] = d["setup"][1][2][:-1]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(d))
    with pytest.raises(InstanceError, match=r"'setup'\[1\]\[2\]"):
        load(path)


def test_zero_jobs_is_validation_error():
    d = {"n": 0, "m": 1, "weights": [], "eligible": [[]], "processing": [[]], "setup": [[[]]]}
    with pytest.raises(InstanceError, match="validation"):
        from_dict(d)


def test_malformed_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"n": 1,\n "m": }')
    with pytest.raises(InstanceError, match="line 2"):
        load(path)


def test_instance_is_immutable():
    inst = tiny()
    with pytest.raises(ValueError):
        inst.p[0, 1] = 3
    with pytest.raises(Exception):
        inst.name = "x"
    assert replace(inst, name="y").name == "y"
