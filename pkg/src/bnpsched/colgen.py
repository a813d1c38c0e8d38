"""Column generation for one node's linear relaxation."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from . import lp
from .column import Column, satisfies
from .constraints import NodeConstraints, predecessor_sets
from .instance import Instance, horizon
from .pricing import EPS, DualPrices, extract_columns, price

__all__ = ["CGParams", "ColumnPool", "RelaxationResult", "ColumnGenerationError", "solve_relaxation", "big_m"]

logger = logging.getLogger(__name__)


class ColumnGenerationError(RuntimeError):
    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


class Cancelled(Exception):
    """Raised inside a relaxation solve when its cancel event is set."""


@dataclass
class CGParams:
    eps: float = EPS
    max_cols: int = 20
    max_iters: int = 10_000
    lanes: int | None = None
    lp_method: str = "highs"  # or "simplex" for the built-in dense solver


class PhaseClock:
    """Accumulates wall time per named phase."""

    def __init__(self):
        self.totals: dict[str, float] = {}

    def add(self, phase, dt):
        self.totals[phase] = self.totals.get(phase, 0.0) + dt

    def merge(self, other: "PhaseClock"):
        for k, v in other.totals.items():
            self.add(k, v)


class ColumnPool:
    """Append-only column store with the master's constraint matrix."""

    def __init__(self, inst: Instance, columns=()):
        self.n, self.m = inst.n, inst.m
        self.columns: list[Column] = []
        self.keys: set = set()
        self._a = np.zeros((self.n, 64))
        self._mach = np.zeros((self.m, 64))
        self._c = np.zeros(64)
        self.extend(columns)

    def __len__(self):
        return len(self.columns)

    def __iter__(self):
        return iter(self.columns)

    def extend(self, cols) -> int:
        """Append columns not already present; returns how many were added."""
        added = 0
        for col in cols:
            if col.key in self.keys:
                continue
            i = len(self.columns)
            if i == self._c.size:
                grow = self._c.size
                self._a = np.hstack((self._a, np.zeros((self.n, grow))))
                self._mach = np.hstack((self._mach, np.zeros((self.m, grow))))
                self._c = np.concatenate((self._c, np.zeros(grow)))
            for j, cnt in col.a.items():
                self._a[j - 1, i] = cnt
            self._mach[col.machine, i] = 1.0
            self._c[i] = col.cost
            self.columns.append(col)
            self.keys.add(col.key)
            added += 1
        return added

    def problem(self, M: float, start: int = 0) -> lp.LpProblem:
        k = len(self.columns)
        return lp.LpProblem(
            c=self._c[start:k], A_eq=self._a[:, start:k], A_le=self._mach[:, start:k], big_m=M
        )


@dataclass
class RelaxationResult:
    status: str  # "optimal" | "infeasible"
    objective: float
    x: np.ndarray
    duals: DualPrices
    pool: list[Column]
    iterations: int
    columns_generated: int
    objectives: list[float] = field(default_factory=list, repr=False)
    min_reduced_cost: float = 0.0

    @property
    def feasible(self) -> bool:
        return self.status == "optimal"

    def used(self, tol=1e-9):
        return [(c, float(v)) for c, v in zip(self.pool, self.x) if v > tol]


def big_m(inst: Instance, T: int | None = None) -> float:
    """Artificial cost exceeding the cost of any schedule within the horizon."""
    T = horizon(inst) if T is None else T
    return float(int(inst.w.sum()) * T + 1)


def solve_relaxation(
    inst: Instance,
    constraints: NodeConstraints,
    warm_pool,
    params: CGParams | None = None,
    *,
    T: int | None = None,
    clock: PhaseClock | None = None,
    cancel=None,
) -> RelaxationResult:
    """Solve the node LP by alternating master solves and exact pricing.

    ``warm_pool`` columns must already satisfy ``constraints``. Terminates
    when pricing finds no state below ``-eps``; the relaxation is
    infeasible if an artificial variable is still positive then.
    """
    params = params or CGParams()
    T = horizon(inst) if T is None else T
    M = big_m(inst, T)
    clock = clock if clock is not None else PhaseClock()
    pool = ColumnPool(inst, warm_pool)
    preds = predecessor_sets(inst, constraints)
    basis = None
    master = lp.IncrementalMaster(inst.n, inst.m, M) if params.lp_method == "highs" else None
    loaded = 0
    objectives = []
    generated = 0
    it = 0
    while True:
        if cancel is not None and cancel.is_set():
            raise Cancelled()
        if it >= params.max_iters:
            raise ColumnGenerationError(
                f"column generation exceeded {params.max_iters} master solves",
                partial={"pool": list(pool), "objectives": objectives},
            )
        t0 = time.perf_counter()
        if master is not None:
            new = pool.problem(M, start=loaded)
            master.add_columns(new.c, new.A_eq, new.A_le)
            loaded = len(pool)
            sol = master.solve()
        else:
            sol = lp.solve(pool.problem(M), basis=basis)
            basis = sol.basis
        clock.add("lp", time.perf_counter() - t0)
        it += 1
        objectives.append(sol.objective)
        duals = DualPrices.from_lp(sol.pi, sol.sigma)
        if (duals.sigma > 1e-6).any():
            raise ColumnGenerationError(f"machine duals must be <= 0, got max {duals.sigma.max()}")

        t0 = time.perf_counter()
        table, vmin, _ = price(inst, preds, duals, T, lanes=params.lanes)
        cols = extract_columns(inst, table, duals, params.max_cols, params.eps, exclude=pool.keys) if vmin < -params.eps else []
        clock.add("pricing", time.perf_counter() - t0)
        if not cols:
            break
        generated += pool.extend(cols)

    logger.debug(
        "relaxation %s obj=%.4f after %d master solves, %d columns",
        sol.status, sol.objective, it, len(pool),
    )
    return RelaxationResult(
        status=sol.status,
        objective=sol.objective,
        x=sol.x,
        duals=duals,
        pool=list(pool),
        iterations=it,
        columns_generated=generated,
        objectives=objectives,
        min_reduced_cost=vmin,
    )
