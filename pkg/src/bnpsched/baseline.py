"""Greedy SCHED heuristic and an exact exhaustive oracle for small instances."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .column import FullSolution, evaluate
from .instance import Instance

__all__ = ["GreedyState", "sched", "brute_force", "enumerate_optimum", "OracleRefused"]

BRUTE_FORCE_CAP = 9


class OracleRefused(ValueError):
    """The instance is too large for exhaustive search."""


@dataclass
class GreedyState:
    completion: list[int]
    last: list[int]
    schedules: list[list[int]]
    remaining: set[int] = field(default_factory=set)

    @classmethod
    def start(cls, inst: Instance) -> "GreedyState":
        m = inst.m
        return cls([0] * m, [0] * m, [[] for _ in range(m)], set(range(1, inst.n + 1)))


def sched(inst: Instance) -> FullSolution:
    """Repeatedly append the eligible (job, machine) pair with the smallest
    ``(c_k + s_{last_k, j} + p_j^k) / w_j``; ties go to the smallest job,
    then the smallest machine."""
    st = GreedyState.start(inst)
    s, p, w = inst.s, inst.p, inst.w
    pairs = [(int(j), int(k)) for j in range(1, inst.n + 1) for k in inst.machines_for(j)]
    while st.remaining:
        best = None
        for j, k in pairs:
            if j not in st.remaining:
                continue
            finish = st.completion[k] + s[k, st.last[k], j] + p[k, j]
            # compare finish/w exactly via cross multiplication
            if best is None or finish * best[1] < best[0] * w[j]:
                best = (int(finish), int(w[j]), j, k)
        finish, _, j, k = best
        st.completion[k] = finish
        st.last[k] = j
        st.schedules[k].append(j)
        st.remaining.discard(j)
    cols = [evaluate(inst, k, seq) for k, seq in enumerate(st.schedules) if seq]
    return FullSolution(cols)


def _best_orderings(inst: Instance, k: int):
    """Exact minimum weighted completion time of every job subset on ``k``.

    Built backwards: ``tail(S, f)`` is the cheapest way to finish the set
    ``S`` starting with ``f``, excluding ``f``'s own (predecessor-dependent)
    duration, which is charged once for all of ``S`` by the caller.
    """
    s, p, w = inst.s[k], inst.p[k], inst.w

    @lru_cache(maxsize=None)
    def tail(S: frozenset, f: int):
        rest = S - {f}
        if not rest:
            return 0, (f,)
        W = sum(int(w[j]) for j in rest)
        best = None
        for g in sorted(rest):
            c, seq = tail(rest, g)
            c += (int(s[f, g]) + int(p[g])) * W
            if best is None or c < best[0]:
                best = (c, (f,) + seq)
        return best

    @lru_cache(maxsize=None)
    def best(S: frozenset):
        if not S:
            return 0, ()
        W = sum(int(w[j]) for j in S)
        out = None
        for f in sorted(S):
            c, seq = tail(S, f)
            c += (int(s[0, f]) + int(p[f])) * W
            if out is None or c < out[0]:
                out = (c, seq)
        return out

    return best


def brute_force(inst: Instance, cap: int = BRUTE_FORCE_CAP) -> tuple[int, FullSolution]:
    """Exact optimum by enumerating every eligible job-to-machine assignment
    and the best ordering of each machine's job set."""
    if inst.n > cap:
        raise OracleRefused(f"brute force limited to n <= {cap}, instance has n = {inst.n}")
    per_machine = [_best_orderings(inst, k) for k in range(inst.m)]
    choices = [inst.machines_for(j).tolist() for j in range(1, inst.n + 1)]
    best = None
    for assign in itertools.product(*choices):
        sets = [[] for _ in range(inst.m)]
        for j, k in enumerate(assign, start=1):
            sets[k].append(j)
        total = 0
        for k, js in enumerate(sets):
            if js:
                total += per_machine[k](frozenset(js))[0]
                if best is not None and total >= best[0]:
                    break
        else:
            if best is None or total < best[0]:
                best = (total, assign)
    total, assign = best
    cols = []
    for k in range(inst.m):
        js = frozenset(j for j, kk in enumerate(assign, start=1) if kk == k)
        if js:
            cols.append(evaluate(inst, k, per_machine[k](js)[1]))
    return total, FullSolution(cols)


def enumerate_optimum(inst: Instance) -> int:
    """Literal enumeration of all assignments and permutations (tiny n only)."""
    best = None
    choices = [inst.machines_for(j).tolist() for j in range(1, inst.n + 1)]
    for assign in itertools.product(*choices):
        sets = [[j for j, k in enumerate(assign, start=1) if k == kk] for kk in range(inst.m)]
        total = 0
        for k, js in enumerate(sets):
            total += min(evaluate(inst, k, perm).cost for perm in itertools.permutations(js))
        best = total if best is None else min(best, total)
    return best
