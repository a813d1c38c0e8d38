import numpy as np
import pytest

from bnpsched.baseline import brute_force, sched
from bnpsched.column import evaluate, satisfies, verify
from bnpsched.constraints import NodeConstraints
from bnpsched.instance import GenConfig, generate, horizon
from bnpsched.tree import (
    Node, SearchBudgetExceeded, SearchParams, branch, flows, is_integer, lower_bound,
    select_edge, solve_dfs, solve_dfs_pool,
)

from conftest import small_instance
from oracles import flows_by_summation


# seeds whose root relaxation is fractional for the generator settings below
BRANCHING_SEEDS = (2, 6, 10, 11, 12, 14)


def branching_instance(seed):
    # short jobs with long setups on fully shared machines
    return generate(GenConfig(n=6, m=2, p_range=(1, 5), s_range=(0, 20), prob=1.0, seed=seed))


def test_flows_single_schedule(two_jobs):
    col = evaluate(two_jobs, 0, [1, 2])
    X = flows([col], [1.0], 1, 2)
    assert X[0, 0, 1] == 1.0 and X[0, 1, 2] == 1.0
    assert X.sum() == 2.0


def test_flows_repeated_arc_counts_twice():
    inst = generate(GenConfig(n=2, m=1, prob=1.0, seed=0))
    col = evaluate(inst, 0, [1, 2, 1, 2])
    X = flows([col], [0.5], 1, 2)
    assert X[0, 1, 2] == 1.0 and X[0, 2, 1] == 0.5 and X[0, 0, 1] == 0.5


@pytest.mark.parametrize("lanes", [1, 3])
def test_flows_match_summation(lanes):
    rng = np.random.default_rng(lanes)
    inst = generate(GenConfig(n=6, m=3, prob=1.0, seed=2))
    cols = [evaluate(inst, int(rng.integers(3)), list(rng.permutation(6)[: rng.integers(1, 6)] + 1)) for _ in range(15)]
    x = rng.random(15)
    assert np.allclose(flows(cols, x, 3, 6, lanes=lanes), flows_by_summation(cols, x, 3, 6))


def test_select_edge_closest_to_half():
    X = np.zeros((1, 3, 3))
    X[0, 0, 1], X[0, 1, 2] = 0.9, 0.5
    assert select_edge(X) == (0, 1, 2)


def test_select_edge_tie_is_lexicographic():
    X = np.zeros((2, 3, 3))
    X[1, 0, 1], X[0, 2, 1] = 0.4, 0.6
    assert select_edge(X) == (0, 2, 1)


def test_select_edge_integral():
    X = np.zeros((1, 3, 3))
    X[0, 0, 1] = 1.0 - 1e-9
    assert select_edge(X) is None


def test_is_integer():
    assert is_integer([0, 1, 1e-8, 1 - 1e-8])
    assert not is_integer([0.5])
    assert not is_integer([1e-4], int_tol=1e-6)


def test_branch_inherits_satisfying_columns(two_jobs):
    cols = [evaluate(two_jobs, 0, s) for s in ([1, 2], [2, 1], [1], [2])]
    parent = Node(0, 3, NodeConstraints(), cols, 10.0)
    ids = iter(range(1, 10))
    force, forbid = branch(parent, (0, 1, 2), ids, 42.0)
    assert (force.depth, forbid.depth) == (4, 4)
    assert force.bound == forbid.bound == 42.0
    assert [c.seq for c in force.pool] == [(1, 2)]
    assert [c.seq for c in forbid.pool] == [(2, 1), (1,), (2,)]
    for child in (force, forbid):
        assert all(satisfies(c, child.constraints) for c in child.pool)


def test_lower_bound_includes_incumbent():
    nodes = [Node(0, 1, NodeConstraints(), [], 7.0), Node(1, 1, NodeConstraints(), [], 9.0)]
    assert lower_bound(nodes, 8.0) == 7.0
    assert lower_bound([], 8.0) == 8.0


def test_root_integral(one_job):
    res = solve_dfs(one_job)
    assert res.objective == 36 and res.lower_bound == 36 and res.nodes_explored == 1


@pytest.mark.parametrize("seed", range(16))
def test_sandwich(seed):
    inst = small_instance(seed, scaled=seed % 2 == 0)
    res = solve_dfs(inst)
    opt, _ = brute_force(inst)
    assert res.lower_bound <= opt + 1e-6
    assert opt <= res.objective
    assert verify(inst, res.incumbent) == res.objective
    assert res.incumbent.makespan <= horizon(inst)


@pytest.mark.parametrize("seed", BRANCHING_SEEDS)
def test_branching_seeds_branch(seed):
    inst = branching_instance(seed)
    res = solve_dfs(inst)
    assert res.nodes_explored > 1
    assert res.lower_bound <= brute_force(inst)[0] + 1e-6 <= res.objective + 1e-6


@pytest.mark.parametrize("seed", BRANCHING_SEEDS)
def test_frontier_covers_optimum(seed):
    # every frontier snapshot contains a node whose constraints the optimum meets
    inst = branching_instance(seed)
    _, opt = brute_force(inst)
    snapshots = []
    solve_dfs(inst, SearchParams(observer=lambda active: snapshots.append(active)))
    for active in snapshots:
        assert any(all(satisfies(c, nd.constraints) for c in opt.columns) for nd in active)


def test_depth_first_order():
    picked = []

    def watch(active):
        # the node expanded next is the deepest, latest pushed one
        d = max(nd.depth for nd in active)
        picked.append((d, [nd for nd in active if nd.depth == d][-1].constraints))

    res = solve_dfs(branching_instance(11), SearchParams(observer=watch))
    assert res.nodes_explored == 4
    depths = [d for d, _ in picked]
    assert depths == sorted(depths)
    # the force child of each branching goes first
    assert all(c.forced for _, c in picked)


def test_pool_with_one_worker_matches_serial():
    for seed in BRANCHING_SEEDS:
        inst = branching_instance(seed)
        a = solve_dfs(inst)
        b = solve_dfs_pool(inst, 1)
        assert a.explored == b.explored
        assert a.objective == b.objective


@pytest.mark.parametrize("workers", [2, 3])
def test_pool_result_is_valid(workers):
    inst = branching_instance(11)
    res = solve_dfs_pool(inst, workers)
    opt, _ = brute_force(inst)
    assert res.lower_bound <= opt + 1e-6 <= res.objective + 1e-6
    assert res.workers == workers


def test_node_budget():
    inst = branching_instance(11)
    with pytest.raises(SearchBudgetExceeded) as info:
        solve_dfs(inst, SearchParams(node_budget=1))
    assert info.value.nodes_explored == 1
    assert info.value.lower_bound <= brute_force(inst)[0] + 1e-6


def test_pool_rejects_zero_workers(one_job):
    with pytest.raises(ValueError):
        solve_dfs_pool(one_job, 0)


def test_timings_split(two_jobs):
    res = solve_dfs(two_jobs)
    assert res.serial_time + res.parallel_time == pytest.approx(res.wall_time)
