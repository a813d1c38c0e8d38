"""
The root relaxation by column generation
========================================

"""

from bnpsched import CGParams, GenConfig, generate, horizon, price, sched, solve_relaxation
from bnpsched.constraints import NodeConstraints

inst = generate(GenConfig(n=20, m=4, seed=3))
start = sched(inst).columns  # the greedy schedules seed the master

rel = solve_relaxation(inst, NodeConstraints(), start, CGParams(max_cols=20))
print(rel.status, round(rel.objective, 3), "after", rel.iterations, "master solves")
print(len(rel.pool), "columns in the pool,", rel.columns_generated, "priced in")

# the master objective never goes up as columns arrive
print([round(v, 1) for v in rel.objectives[:8]], "...")

# here the relaxation happens to pick one schedule per machine;
# fractional optima spread x over several
for col, v in rel.used():
    print(f"x={v:.3f} machine {col.machine} seq {col.seq}")

# at convergence no schedule prices out negative
_, vmin, _ = price(inst, NodeConstraints(), rel.duals, horizon(inst))
print("most negative reduced cost", vmin)

# lower bound from the relaxation vs the greedy value
print("sched", sched(inst).objective, "relaxation", round(rel.objective, 2))
