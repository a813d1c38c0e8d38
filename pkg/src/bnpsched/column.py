"""Machine schedules (columns) and full-solution checking."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .constraints import NodeConstraints
from .instance import Instance

__all__ = ["Column", "FullSolution", "evaluate", "reduced_cost", "satisfies", "verify"]


@dataclass(frozen=True)
class Column:
    """One schedule on one machine.

    ``a`` counts job occurrences and ``delta`` counts adjacencies ``(i, j)``
    of the sequence prefixed by the fictitious job 0.
    """

    machine: int
    seq: tuple[int, ...]
    cost: int
    makespan: int
    a: dict = field(compare=False, repr=False)
    delta: dict = field(compare=False, repr=False)

    @property
    def key(self) -> tuple[int, tuple[int, ...]]:
        return (self.machine, self.seq)

    @property
    def cyclic(self) -> bool:
        return any(c > 1 for c in self.a.values())


def evaluate(inst: Instance, k: int, seq) -> Column:
    """Build the column for ``seq`` on machine ``k`` with its weighted completion time."""
    seq = tuple(int(j) for j in seq)
    bad = [j for j in seq if not (1 <= j <= inst.n) or not inst.elig[k, j]]
    if bad:
        raise ValueError(f"jobs {bad} are not eligible on machine {k}")
    t = 0
    cost = 0
    prev = 0
    for j in seq:
        t += int(inst.s[k, prev, j]) + int(inst.p[k, j])
        cost += int(inst.w[j]) * t
        prev = j
    arcs = zip((0,) + seq, seq)
    return Column(k, seq, cost, t, dict(Counter(seq)), dict(Counter(arcs)))


def reduced_cost(col: Column, pi, sigma) -> float:
    """``cost - sum_j a_j * pi[j] - sigma[machine]``; ``pi`` is indexed by job id."""
    return col.cost - sum(c * pi[j] for j, c in col.a.items()) - sigma[col.machine]


def satisfies(col: Column, cons: NodeConstraints) -> bool:
    """Whether ``col`` is a member of the node's restricted schedule set."""
    k = col.machine
    for (fk, i, j) in cons.forbidden:
        if fk == k and col.delta.get((i, j), 0) >= 1:
            return False
    if not cons.forced:
        return True
    full = (0,) + col.seq
    for (fk, i, j) in cons.forced:
        if fk != k:
            if j in col.a or (i >= 1 and i in col.a):
                return False
            continue
        for r, job in enumerate(full):
            if r > 0 and job == j and full[r - 1] != i:
                return False
            if job == i and (r > 0 or i == 0) and r + 1 < len(full) and full[r + 1] != j:
                return False
            if job == i and i >= 1 and r + 1 == len(full):
                return False
    return True


@dataclass
class FullSolution:
    """At most one column per machine."""

    columns: list[Column]

    @property
    def objective(self) -> int:
        return sum(c.cost for c in self.columns)

    @property
    def makespan(self) -> int:
        return max((c.makespan for c in self.columns), default=0)

    def schedules(self, m: int) -> list[tuple[int, ...]]:
        out = [()] * m
        for c in self.columns:
            out[c.machine] = c.seq
        return out


def verify(inst: Instance, sol: FullSolution) -> int | list[str]:
    """Return the objective of a valid solution, or the list of violations."""
    problems = []
    cover = np.zeros(inst.n + 1, dtype=int)
    seen = Counter(c.machine for c in sol.columns)
    for k, cnt in sorted(seen.items()):
        if not 0 <= k < inst.m:
            problems.append(f"machine {k} does not exist")
        elif cnt > 1:
            problems.append(f"machine {k} has {cnt} columns")
    for col in sol.columns:
        if not 0 <= col.machine < inst.m:
            continue
        for j in col.seq:
            if 1 <= j <= inst.n:
                cover[j] += 1
                if not inst.elig[col.machine, j]:
                    problems.append(f"job {j} not eligible on machine {col.machine}")
            else:
                problems.append(f"unknown job {j} on machine {col.machine}")
        if col.cyclic:
            problems.append(f"machine {col.machine} schedule is cyclic")
        try:
            ref = evaluate(inst, col.machine, [j for j in col.seq if 1 <= j <= inst.n])
            if ref.cost != col.cost:
                problems.append(
                    f"machine {col.machine} cost {col.cost} differs from evaluated {ref.cost}"
                )
        except ValueError:
            pass
    for j in range(1, inst.n + 1):
        if cover[j] != 1:
            problems.append(f"job {j} covered {cover[j]} times")
    return problems if problems else sol.objective
