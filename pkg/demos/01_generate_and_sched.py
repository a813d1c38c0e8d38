"""
Random instances and the greedy baseline
========================================

"""

# an instance holds weights, eligibility, processing and setup times;
# index 0 of the job axis is the fictitious start job
import numpy as np
from bnpsched import GenConfig, generate, horizon, sched, verify

inst = generate(GenConfig(n=12, m=3, seed=7))
inst.n, inst.m
inst.p[:, 1:]          # processing times, machine x job
inst.elig[:, 1:]       # which machine may run which job
inst.s[0, 0, 1:]       # setup from the start state on machine 0
horizon(inst)          # upper bound on any schedule's makespan

# the greedy rule appends whichever eligible (job, machine) pair has the
# smallest completion time per unit of weight
sol = sched(inst)
for col in sol.columns:
    print(col.machine, col.seq, col.cost)
print("objective", sol.objective, "verified", verify(inst, sol))

# every job lands on a machine it is allowed to use
placed = {j: c.machine for c in sol.columns for j in c.seq}
assert all(inst.elig[k, j] for j, k in placed.items())
print(np.bincount(list(placed.values()), minlength=inst.m), "jobs per machine")
