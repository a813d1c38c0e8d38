"""Branching constraints on arcs and the predecessor sets they induce."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .instance import Instance

__all__ = ["NodeConstraints", "MachinePreds", "PredecessorSets", "predecessor_sets"]

Arc = tuple[int, int, int]  # (machine, predecessor i, job j)


@dataclass(frozen=True)
class NodeConstraints:
    forced: frozenset = field(default_factory=frozenset)
    forbidden: frozenset = field(default_factory=frozenset)

    def force(self, arc: Arc) -> "NodeConstraints":
        return NodeConstraints(self.forced | {tuple(arc)}, self.forbidden)

    def forbid(self, arc: Arc) -> "NodeConstraints":
        return NodeConstraints(self.forced, self.forbidden | {tuple(arc)})

    def constrains(self, arc: Arc) -> bool:
        arc = tuple(arc)
        return arc in self.forced or arc in self.forbidden

    def __len__(self):
        return len(self.forced) + len(self.forbidden)


@dataclass(frozen=True)
class MachinePreds:
    """Pricing data for one machine in local indexing.

    ``jobs[0]`` is the fictitious job 0, ``jobs[1:]`` the allowed job ids in
    increasing order. ``allow[a, b]`` says local job ``a`` may directly
    precede local job ``b``; ``terminal[b]`` says a schedule may end with
    ``b``.
    """

    jobs: np.ndarray
    allow: np.ndarray
    terminal: np.ndarray

    def preds_of(self, j: int) -> set[int]:
        """Global ids of allowed predecessors of global job ``j``."""
        (loc,) = np.flatnonzero(self.jobs == j)
        return {int(self.jobs[a]) for a in np.flatnonzero(self.allow[:, loc])}


PredecessorSets = list  # list[MachinePreds], one per machine


def predecessor_sets(inst: Instance, cons: NodeConstraints) -> PredecessorSets:
    """Derive per-machine predecessor sets from the node's arc constraints.

    A forbidden arc removes its predecessor from the job's set. A forced arc
    ``(k, i, j)`` makes ``i`` the only predecessor of ``j`` on ``k``, lets
    ``i`` precede nothing but ``j`` there (nor end a schedule, for ``i >= 1``)
    and removes ``j`` (and ``i >= 1``) from every other machine.
    """
    m, n = inst.m, inst.n
    elig = inst.elig.copy()
    allow = np.zeros((m, n + 1, n + 1), dtype=bool)
    allow[:, 0, :] = elig
    allow[:, 1:, :] = elig[:, 1:, None] & elig[:, None, :]
    idx = np.arange(n + 1)
    allow[:, idx, idx] = False
    terminal = elig.copy()

    for (k, i, j) in cons.forbidden:
        allow[k, i, j] = False
    for (k, i, j) in cons.forced:
        keep = allow[k, i, j]
        allow[k, :, j] = False
        allow[k, i, :] = False
        allow[k, i, j] = keep
        if i >= 1:
            terminal[k, i] = False
        others = np.arange(m) != k
        elig[others, j] = False
        if i >= 1:
            elig[others, i] = False

    out = []
    for k in range(m):
        jobs = np.flatnonzero(elig[k])
        loc = np.concatenate(([0], jobs))
        a = allow[k][np.ix_(loc, loc)].copy()
        a[:, 0] = False
        t = terminal[k][loc].copy()
        t[0] = False
        out.append(MachinePreds(loc, a, t))
    return out
