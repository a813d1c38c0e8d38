"""
Pricing lanes and Amdahl's law
==============================

"""

import math
import os
import time

import numpy as np
from bnpsched import GenConfig, DualPrices, amdahl, generate, horizon, price
from bnpsched.colgen import PhaseClock
from bnpsched.constraints import NodeConstraints, predecessor_sets

inst = generate(GenConfig(n=100, m=48, seed=0))
T = horizon(inst)
preds = predecessor_sets(inst, NodeConstraints())
rng = np.random.default_rng(0)
duals = DualPrices(np.concatenate(([0.0], rng.uniform(0, 5000, inst.n))), np.zeros(inst.m))

# machines are priced independently, so the tables never depend on the lane count
a, _, _ = price(inst, preds, duals, T, lanes=1)
b, _, _ = price(inst, preds, duals, T, lanes=6)
print("identical:", all(np.array_equal(x.f, y.f) for x, y in zip(a.machines, b.machines)))

def timed(lanes):
    clock = PhaseClock()
    t0 = time.perf_counter()
    price(inst, preds, duals, T, lanes=lanes, clock=clock)
    return time.perf_counter() - t0, clock.totals["machine_loop"]

wall1, loop1 = timed(1)
s = 1 - loop1 / wall1  # share of the call outside the machine loop
print(f"serial fraction {s:.3f} on {os.cpu_count()} cpu(s)")
for lanes in (1, 2, 4, 6, 8):
    wall, _ = timed(lanes)
    print(lanes, f"theory {amdahl(s, lanes):.2f}", f"observed {wall1 / wall:.2f}")
print("limit", round(amdahl(s, math.inf), 2))

# one serial fraction fixes the whole curve
print(round(amdahl(1 / 12.28, 12), 2), round(amdahl(1 / 12.28, math.inf), 2))
