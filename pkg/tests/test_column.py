import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bnpsched.baseline import brute_force
from bnpsched.column import FullSolution, evaluate, reduced_cost, satisfies, verify
from bnpsched.constraints import NodeConstraints
from bnpsched.instance import GenConfig, generate

from conftest import small_instance


def test_evaluate_single(one_job):
    col = evaluate(one_job, 0, [1])
    assert (col.makespan, col.cost) == (12, 36)


def test_evaluate_empty(one_job):
    col = evaluate(one_job, 0, [])
    assert col.cost == 0 and col.a == {} and col.delta == {}


def test_evaluate_two(two_jobs):
    col = evaluate(two_jobs, 0, [1, 2])
    # prefix sums: C1 = 2 + 10, C2 = C1 + 1 + 5
    assert col.makespan == 18
    assert col.cost == 3 * 12 + 2 * 18 == 72
    assert col.a == {1: 1, 2: 1}
    assert col.delta == {(0, 1): 1, (1, 2): 1}


def test_evaluate_rejects_ineligible():
    inst = generate(GenConfig(n=4, m=2, prob=0.5, seed=2))
    k, j = np.argwhere(~inst.elig[:, 1:])[0]
    with pytest.raises(ValueError):
        evaluate(inst, int(k), [int(j) + 1])


def test_reduced_cost(two_jobs):
    col = evaluate(two_jobs, 0, [1, 2])
    assert reduced_cost(col, [0, 0, 0], [0]) == 72
    assert reduced_cost(col, [0, 36, 36], [0]) == 0
    assert reduced_cost(col, [0, 40, 40], [-5]) == 72 - 80 + 5


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000), data=st.data())
def test_position_additive(seed, data):
    inst = generate(GenConfig(n=5, m=1, prob=1.0, seed=seed))
    seq = data.draw(st.lists(st.integers(1, 5), max_size=6))
    seq = [j for i, j in enumerate(seq) if i == 0 or seq[i - 1] != j]
    j = data.draw(st.integers(1, 5).filter(lambda j: not seq or seq[-1] != j))
    base = evaluate(inst, 0, seq)
    last = seq[-1] if seq else 0
    ext = evaluate(inst, 0, seq + [j])
    assert ext.cost == base.cost + inst.w[j] * (base.makespan + inst.s[0, last, j] + inst.p[0, j])
    assert reduced_cost(base, np.zeros(6), np.zeros(1)) == base.cost


def _inst12():
    return generate(GenConfig(n=3, m=2, prob=1.0, seed=0))


def test_satisfies_forbidden():
    col = evaluate(_inst12(), 0, [1, 2])
    assert not satisfies(col, NodeConstraints().forbid((0, 1, 2)))
    assert satisfies(col, NodeConstraints().forbid((1, 1, 2)))


def test_satisfies_forced():
    inst = _inst12()
    cons = NodeConstraints().force((0, 1, 2))
    assert satisfies(evaluate(inst, 0, [1, 2]), cons)
    assert not satisfies(evaluate(inst, 1, [2]), cons)  # job 2 pinned to machine 0
    assert not satisfies(evaluate(inst, 1, [1]), cons)  # so is job 1
    assert not satisfies(evaluate(inst, 0, [1]), cons)  # 1 must be followed by 2
    assert not satisfies(evaluate(inst, 0, [3, 2]), cons)  # 2 must follow 1
    assert not satisfies(evaluate(inst, 0, [1, 3, 2]), cons)
    assert satisfies(evaluate(inst, 0, [3]), cons)
    assert satisfies(evaluate(inst, 1, [3]), cons)


def test_satisfies_forced_from_start():
    inst = _inst12()
    cons = NodeConstraints().force((0, 0, 2))
    assert satisfies(evaluate(inst, 0, [2, 1]), cons)
    assert not satisfies(evaluate(inst, 0, [1, 2]), cons)
    assert not satisfies(evaluate(inst, 1, [2]), cons)
    assert satisfies(evaluate(inst, 1, [1]), cons)  # job 0 pins nothing


def test_verify_single(one_job):
    assert verify(one_job, FullSolution([evaluate(one_job, 0, [1])])) == 36


def test_verify_double_cover():
    inst = generate(GenConfig(n=1, m=2, prob=1.0, seed=0))
    sol = FullSolution([evaluate(inst, 0, [1]), evaluate(inst, 1, [1])])
    assert "job 1 covered 2 times" in verify(inst, sol)


def test_verify_reports_everything():
    inst = generate(GenConfig(n=3, m=1, prob=1.0, seed=0))
    sol = FullSolution([evaluate(inst, 0, [1, 2, 1])])
    out = verify(inst, sol)
    assert "machine 0 schedule is cyclic" in out
    assert "job 1 covered 2 times" in out
    assert "job 3 covered 0 times" in out


def test_verify_matches_brute_force():
    inst = small_instance(7, n=6, m=2)
    opt, sol = brute_force(inst)
    assert verify(inst, sol) == opt
