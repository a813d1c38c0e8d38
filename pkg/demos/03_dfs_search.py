"""
Lazy depth-first branch and price
=================================

"""

from bnpsched import GenConfig, SearchParams, brute_force, gap_lb, gap_sched, generate, sched, solve_dfs

# small jobs and long setups make fractional relaxations more likely
inst = generate(GenConfig(n=6, m=2, p_range=(1, 5), s_range=(0, 20), prob=1.0, seed=11))

# watch the frontier: the deepest node is always expanded next
def show(active):
    print("frontier", [(nd.id, nd.depth, round(nd.bound, 1)) for nd in active])

res = solve_dfs(inst, SearchParams(observer=show))
print("objective", res.objective, "lower bound", round(res.lower_bound, 2))
print("nodes", res.nodes_explored, "explored order", res.explored)

# the exact optimum sits between the two
opt, _ = brute_force(inst)
print("optimum", opt)
assert res.lower_bound <= opt + 1e-6 <= res.objective + 1e-6

print(f"gap to bound {gap_lb(res.objective, res.lower_bound):.2f}%")
print(f"gain over greedy {gap_sched(sched(inst).objective, res.objective):.2f}%")

# a bigger instance, solved without any oracle
big = generate(GenConfig(n=60, m=10, seed=1))
r = solve_dfs(big)
print(big.name, r.objective, f"{gap_lb(r.objective, r.lower_bound):.3f}%", f"{r.wall_time:.1f}s")
