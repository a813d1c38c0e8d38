"""Exact pricing by dynamic programming over completion times.

For each machine ``k`` the table ``f[j, t]`` holds the minimum reduced cost
of a schedule on ``k`` that ends with job ``j`` exactly at time ``t``::

    f[j, t] = min_{i in P_j} f[i, t - s_ij - p_j] + w_j * t - pi_j

seeded with ``f[0, 0] = -sigma_k``. Schedules may repeat jobs. Machines are
independent, so the machine loop is split across a configurable number of
thread lanes; the compiled kernel releases the GIL.
"""
from __future__ import annotations

import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

from .column import Column, evaluate
from .constraints import MachinePreds, NodeConstraints, predecessor_sets
from .instance import Instance

__all__ = [
    "DualPrices",
    "MachineTable",
    "PricingTable",
    "price",
    "extract_columns",
    "set_lanes",
    "get_lanes",
    "EPS",
]

EPS = 1e-7
INF = np.inf

_lanes = 1
_pools: dict[int, ThreadPoolExecutor] = {}
_pool_lock = threading.Lock()


def set_lanes(count: int) -> None:
    """Set the default number of lanes used by :func:`price`."""
    global _lanes
    if int(count) < 1:
        raise ValueError(f"lane count must be >= 1, got {count}")
    _lanes = int(count)


def get_lanes() -> int:
    return _lanes


def _executor(lanes: int) -> ThreadPoolExecutor:
    with _pool_lock:
        ex = _pools.get(lanes)
        if ex is None:
            ex = _pools[lanes] = ThreadPoolExecutor(lanes, thread_name_prefix="pricing")
        return ex


@dataclass(frozen=True)
class DualPrices:
    """``pi`` indexed by job id (``pi[0]`` unused), ``sigma`` by machine."""

    pi: np.ndarray
    sigma: np.ndarray

    @classmethod
    def zeros(cls, inst: Instance) -> "DualPrices":
        return cls(np.zeros(inst.n + 1), np.zeros(inst.m))

    @classmethod
    def from_lp(cls, pi_jobs, sigma) -> "DualPrices":
        """From row duals with jobs in 0-based row order."""
        return cls(np.concatenate(([0.0], np.asarray(pi_jobs, float))), np.asarray(sigma, float))


@numba.njit(cache=True, nogil=True)
def _dp_kernel(T, allow, dur, wj, pij, sigma_k, f, pred):
    L1 = allow.shape[0]
    f[0, 0] = -sigma_k
    for t in range(1, T + 1):
        for b in range(1, L1):
            best = INF
            arg = -1
            for a in range(L1):
                if not allow[a, b]:
                    continue
                t0 = t - dur[a, b]
                if t0 < 0:
                    continue
                v = f[a, t0]
                if v < best:
                    best = v
                    arg = a
            if arg >= 0:
                f[b, t] = best + wj[b] * t - pij[b]
                pred[b, t] = arg


@dataclass
class MachineTable:
    """DP values for one machine in local job indexing (see ``MachinePreds``)."""

    machine: int
    preds: MachinePreds
    f: np.ndarray  # (L+1, T+1)
    pred: np.ndarray  # local predecessor index, -1 if unreachable
    dur: np.ndarray  # dur[a, b] = s_ab + p_b

    @property
    def jobs(self):
        return self.preds.jobs

    def candidates(self) -> np.ndarray:
        """Terminal-state values, ``+inf`` where a schedule may not end."""
        v = self.f[1:, 1:].copy()
        v[~self.preds.terminal[1:]] = INF
        return v


@dataclass
class PricingTable:
    T: int
    machines: list[MachineTable]

    def value(self, k: int, j: int, t: int) -> float:
        mt = self.machines[k]
        loc = np.flatnonzero(mt.jobs == j)
        if loc.size == 0 or not 0 <= t <= self.T:
            return INF
        return float(mt.f[loc[0], t])


def _solve_machine(inst: Instance, k: int, mp: MachinePreds, duals: DualPrices, T: int) -> MachineTable:
    jobs = mp.jobs
    L1 = jobs.size
    dur = (inst.s[k][np.ix_(jobs, jobs)] + inst.p[k, jobs][None, :]).astype(np.int64)
    wj = inst.w[jobs].astype(np.float64)
    pij = np.asarray(duals.pi, dtype=np.float64)[jobs]
    pij[0] = 0.0
    f = np.full((L1, T + 1), INF)
    pred = np.full((L1, T + 1), -1, dtype=np.int32)
    _dp_kernel(T, mp.allow, dur, wj, pij, float(duals.sigma[k]), f, pred)
    return MachineTable(k, mp, f, pred, dur)


def price(
    inst: Instance,
    preds,
    duals: DualPrices,
    T: int,
    lanes: int | None = None,
    clock=None,
):
    """Fill the pricing tables for every machine.

    ``preds`` is a list of :class:`MachinePreds` (or a ``NodeConstraints`` to
    derive them from). Returns ``(table, min_value, (k, j, t))`` where the
    minimum runs over real jobs and ``t >= 1``, ties broken by the smallest
    ``(k, j, t)``; the argmin is ``None`` when no state is reachable.
    ``clock`` (a ``PhaseClock``) receives the wall time of the machine loop
    under ``"machine_loop"``.
    """
    if T < 1:
        raise ValueError(f"horizon must be >= 1, got {T}")
    if isinstance(preds, NodeConstraints):
        preds = predecessor_sets(inst, preds)
    lanes = _lanes if lanes is None else int(lanes)
    m = inst.m
    t0 = time.perf_counter()
    if lanes <= 1 or m <= 1:
        tables = [_solve_machine(inst, k, preds[k], duals, T) for k in range(m)]
    else:
        chunks = [list(range(k, m, lanes)) for k in range(min(lanes, m))]

        def run(ks):
            return [(k, _solve_machine(inst, k, preds[k], duals, T)) for k in ks]

        tables = [None] * m
        for part in _executor(lanes).map(run, chunks):
            for k, tab in part:
                tables[k] = tab
    if clock is not None:
        clock.add("machine_loop", time.perf_counter() - t0)
    table = PricingTable(T, tables)
    best, arg = INF, None
    for mt in tables:
        cand = mt.candidates()
        if cand.size == 0:
            continue
        idx = int(np.argmin(cand))
        v = float(cand.flat[idx])
        if v < best:
            b, t = divmod(idx, cand.shape[1])
            best, arg = v, (mt.machine, int(mt.jobs[b + 1]), t + 1)
    return table, best, arg


def _backtrack(mt: MachineTable, b: int, t: int) -> list[int]:
    seq = []
    while b != 0:
        seq.append(int(mt.jobs[b]))
        a = int(mt.pred[b, t])
        t -= int(mt.dur[a, b])
        b = a
    seq.reverse()
    return seq


def extract_columns(
    inst: Instance,
    table: PricingTable,
    duals: DualPrices,
    max_cols: int = 20,
    eps: float = EPS,
    exclude=(),
) -> list[Column]:
    """Columns for the most negative terminal states, at most ``max_cols``.

    States with value below ``-eps`` are taken in increasing value, ties by
    ``(k, j, t)``. Columns whose ``(machine, seq)`` is in ``exclude`` or
    already taken are skipped.
    """
    if max_cols < 1 or eps <= 0:
        raise ValueError("max_cols must be >= 1 and eps > 0")
    vals, ks, js, ts = [], [], [], []
    for mt in table.machines:
        cand = mt.candidates()
        flat = cand.ravel()
        neg = np.flatnonzero(flat < -eps)
        if neg.size == 0:
            continue
        if neg.size > max_cols:
            # keep every state tied with the max_cols-th best value
            cut = np.partition(flat[neg], max_cols - 1)[max_cols - 1]
            neg = neg[flat[neg] <= cut]
        b, t = np.divmod(neg, cand.shape[1])
        vals.append(flat[neg])
        ks.append(np.full(neg.size, mt.machine))
        js.append(mt.jobs[b + 1])
        ts.append(t + 1)
    if not vals:
        return []
    vals, ks, js, ts = map(np.concatenate, (vals, ks, js, ts))
    order = np.lexsort((ts, js, ks, vals))
    seen = set(exclude)
    out = []
    for idx in order:
        k, j, t = int(ks[idx]), int(js[idx]), int(ts[idx])
        mt = table.machines[k]
        (b,) = np.flatnonzero(mt.jobs == j)
        col = evaluate(inst, k, _backtrack(mt, int(b), t))
        if col.key in seen:
            continue
        seen.add(col.key)
        out.append(col)
        if len(out) >= max_cols:
            break
    return out
