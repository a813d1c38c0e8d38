"""Lazy depth-first branch-and-price heuristic.

The search solves the root relaxation, then repeatedly expands the deepest
active node until some node's relaxation has an integral optimum. Branching
is on arc flows ``X[k, i, j]`` (total LP weight of schedules on ``k`` where
``i`` directly precedes ``j``): one child forces the arc, the other forbids
it.

``solve_dfs_pool`` runs the same loop with a master thread that owns the
active list and worker threads that solve node relaxations, exchanging only
node and result values through queues.
"""
from __future__ import annotations

import itertools
import logging
import math
import queue
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baseline import sched
from .colgen import Cancelled, CGParams, PhaseClock, RelaxationResult, solve_relaxation
from .column import Column, FullSolution, evaluate, satisfies, verify
from .constraints import NodeConstraints
from .instance import Instance, horizon
from .pricing import EPS

__all__ = [
    "Node",
    "SearchParams",
    "SearchResult",
    "SearchBudgetExceeded",
    "SearchError",
    "flows",
    "select_edge",
    "branch",
    "is_integer",
    "solve_dfs",
    "solve_dfs_pool",
    "lower_bound",
]

logger = logging.getLogger(__name__)


class SearchError(RuntimeError):
    """Internal inconsistency during the search."""


class SearchBudgetExceeded(RuntimeError):
    def __init__(self, msg, lower_bound, nodes_explored, diagnostics=None):
        super().__init__(msg)
        self.lower_bound = lower_bound
        self.nodes_explored = nodes_explored
        self.diagnostics = diagnostics or {}


@dataclass
class Node:
    id: int
    depth: int
    constraints: NodeConstraints
    pool: list[Column]
    bound: float = -math.inf


@dataclass
class SearchParams:
    eps: float = EPS
    int_tol: float = 1e-6
    max_cols: int = 20
    lanes: int | None = None
    node_budget: int = 1_000_000
    time_budget: float | None = None
    max_cg_iters: int = 10_000
    observer: object = None  # called with the active list before each selection

    def cg(self) -> CGParams:
        return CGParams(eps=self.eps, max_cols=self.max_cols, max_iters=self.max_cg_iters, lanes=self.lanes)


@dataclass
class SearchResult:
    incumbent: FullSolution
    objective: int
    lower_bound: float
    root_bound: float
    nodes_explored: int
    columns_generated: int
    wall_time: float
    timings: dict
    explored: list[int] = field(default_factory=list)
    workers: int = 0

    @property
    def serial_time(self) -> float:
        """Time outside the lane-parallel loops (pricing and flow computation)."""
        return max(self.wall_time - self.timings.get("pricing", 0.0) - self.timings.get("branching", 0.0), 0.0)

    @property
    def parallel_time(self) -> float:
        return self.timings.get("pricing", 0.0) + self.timings.get("branching", 0.0)


def is_integer(x, int_tol: float = 1e-6) -> bool:
    x = np.asarray(x, dtype=float)
    return bool(np.all((np.abs(x) <= int_tol) | (np.abs(x - 1.0) <= int_tol)))


def _machine_flows(columns, x, k, n):
    Xk = np.zeros((n + 1, n + 1))
    for col, v in zip(columns, x):
        if col.machine != k or v == 0.0:
            continue
        for (i, j), c in col.delta.items():
            Xk[i, j] += c * v
    return Xk


def flows(columns, x, m: int, n: int, lanes: int = 1) -> np.ndarray:
    """``X[k, i, j] = sum_w delta_ij(w) * x_w`` over the columns on machine ``k``."""
    cols = list(columns)
    x = np.asarray(x, dtype=float)
    X = np.zeros((m, n + 1, n + 1))
    if lanes <= 1 or m <= 1:
        for k in range(m):
            X[k] = _machine_flows(cols, x, k, n)
        return X
    with ThreadPoolExecutor(lanes) as ex:
        for k, Xk in zip(range(m), ex.map(lambda k: _machine_flows(cols, x, k, n), range(m))):
            X[k] = Xk
    return X


def select_edge(X: np.ndarray, int_tol: float = 1e-6):
    """Fractional arc closest to 0.5 as ``(k, i, j)``, or ``None``."""
    X = np.asarray(X, dtype=float)
    frac = np.minimum(X - np.floor(X), np.ceil(X) - X)
    mask = frac > int_tol
    if not mask.any():
        return None
    dist = np.where(mask, np.abs(X - 0.5), np.inf)
    best = dist.min()
    flat = int(np.flatnonzero(dist.ravel() <= best + 1e-12)[0])
    return tuple(int(v) for v in np.unravel_index(flat, X.shape))


def branch(node: Node, arc, ids, bound: float, pool=None) -> tuple[Node, Node]:
    """Children ``(force, forbid)`` for ``arc``; each inherits the parent's
    columns that satisfy its constraints."""
    pool = node.pool if pool is None else pool
    out = []
    for cons in (node.constraints.force(arc), node.constraints.forbid(arc)):
        kept = [c for c in pool if satisfies(c, cons)]
        out.append(Node(next(ids), node.depth + 1, cons, kept, bound))
    return out[0], out[1]


def lower_bound(active, z_dfs: float) -> float:
    """Smallest bound over the remaining frontier, the incumbent's node included."""
    return min([z_dfs] + [nd.bound for nd in active])


def _select(active: list[Node]) -> Node:
    idx = max(range(len(active)), key=lambda i: (active[i].depth, i))
    return active.pop(idx)


def _decompose(inst: Instance, X: np.ndarray, int_tol: float) -> FullSolution | None:
    cols = []
    for k in range(inst.m):
        seq, cur, seen = [], 0, set()
        while True:
            nxt = np.flatnonzero(np.abs(X[k, cur, 1:] - 1.0) <= int_tol)
            if nxt.size != 1:
                break
            cur = int(nxt[0]) + 1
            if cur in seen:
                return None
            seen.add(cur)
            seq.append(cur)
        if seq:
            cols.append(evaluate(inst, k, seq))
    sol = FullSolution(cols)
    return sol if not isinstance(verify(inst, sol), list) else None


def _integral_solution(inst, rel: RelaxationResult, X, int_tol):
    """FullSolution if the relaxation optimum is integral, else ``None``."""
    if is_integer(rel.x, int_tol):
        cols = [c for c, v in zip(rel.pool, rel.x) if v > 0.5]
        sol = FullSolution(cols)
        res = verify(inst, sol)
        if isinstance(res, list):
            raise SearchError("integral relaxation is not a valid schedule: " + "; ".join(res))
        return sol
    if select_edge(X, int_tol) is None:
        sol = _decompose(inst, X, int_tol)
        if sol is None:
            raise SearchError("fractional master with integral flows that do not decompose")
        return sol
    return None


class _Search:
    """Shared state and steps of the serial and pooled drivers."""

    def __init__(self, inst: Instance, params: SearchParams):
        self.inst = inst
        self.params = params
        self.T = horizon(inst)
        self.clock = PhaseClock()
        self.ids = itertools.count()
        self.explored: list[int] = []
        self.columns_generated = 0
        self.start = time.perf_counter()

    def root(self) -> Node:
        return Node(next(self.ids), 0, NodeConstraints(), sched(self.inst).columns)

    def relax(self, node: Node, cancel=None):
        clock = PhaseClock()
        t0 = time.perf_counter()
        rel = solve_relaxation(
            self.inst, node.constraints, node.pool, self.params.cg(), T=self.T, clock=clock, cancel=cancel
        )
        clock.add("relax_wall", time.perf_counter() - t0)
        return rel, clock

    def absorb(self, node: Node, rel: RelaxationResult, clock: PhaseClock):
        self.explored.append(node.id)
        self.columns_generated += rel.columns_generated
        self.clock.merge(clock)

    def examine(self, node: Node, rel: RelaxationResult):
        """Return ``(solution, children)`` for a solved feasible node."""
        t0 = time.perf_counter()
        used = rel.used()
        X = flows([c for c, _ in used], [v for _, v in used], self.inst.m, self.inst.n, lanes=self.params.lanes or 1)
        arc = select_edge(X, self.params.int_tol)
        self.clock.add("branching", time.perf_counter() - t0)
        sol = _integral_solution(self.inst, rel, X, self.params.int_tol)
        if sol is not None:
            return sol, ()
        if node.constraints.constrains(arc):
            raise SearchError(f"branching arc {arc} is already constrained at node {node.id}")
        force, forbid = branch(node, arc, self.ids, rel.objective, pool=rel.pool)
        # forbid pushed first so the force child is expanded next
        return None, (forbid, force)

    def check_budget(self, active, inflight=()):
        p = self.params
        over = None
        if len(self.explored) >= p.node_budget:
            over = f"node budget of {p.node_budget} exhausted"
        elif p.time_budget is not None and time.perf_counter() - self.start > p.time_budget:
            over = f"time budget of {p.time_budget}s exhausted"
        if over:
            pending = list(active) + list(inflight)
            lb = min((nd.bound for nd in pending), default=-math.inf)
            raise SearchBudgetExceeded(
                over, lb, len(self.explored), {"active": len(active), "inflight": len(inflight)}
            )

    def result(self, sol: FullSolution, lb: float, root_bound: float, workers=0) -> SearchResult:
        res = verify(self.inst, sol)
        if isinstance(res, list):
            raise SearchError("incumbent failed verification: " + "; ".join(res))
        if sol.makespan > self.T:
            raise SearchError(f"incumbent makespan {sol.makespan} exceeds horizon {self.T}")
        wall = time.perf_counter() - self.start
        return SearchResult(
            incumbent=sol,
            objective=int(res),
            lower_bound=float(min(lb, res)),
            root_bound=root_bound,
            nodes_explored=len(self.explored),
            columns_generated=self.columns_generated,
            wall_time=wall,
            timings=dict(self.clock.totals),
            explored=list(self.explored),
            workers=workers,
        )

    def start_tree(self):
        """Solve the root; returns ``(result or None, active list, root bound)``."""
        root = self.root()
        rel, clock = self.relax(root)
        self.absorb(root, rel, clock)
        if not rel.feasible:
            raise SearchError("root relaxation is infeasible; instance has no schedule")
        sol, children = self.examine(root, rel)
        if sol is not None:
            return self.result(sol, float(sol.objective), rel.objective), [], rel.objective
        return None, list(children), rel.objective


def solve_dfs(inst: Instance, params: SearchParams | None = None) -> SearchResult:
    """Serial lazy depth-first search; stops at the first integral relaxation."""
    params = params or SearchParams()
    s = _Search(inst, params)
    done, active, root_bound = s.start_tree()
    if done is not None:
        return done
    while True:
        if not active:
            raise SearchError("active list exhausted without an integral relaxation")
        s.check_budget(active)
        if params.observer is not None:
            params.observer(list(active))
        node = _select(active)
        rel, clock = s.relax(node)
        s.absorb(node, rel, clock)
        if not rel.feasible:
            continue
        sol, children = s.examine(node, rel)
        if sol is not None:
            return s.result(sol, lower_bound(active, rel.objective), root_bound)
        active.extend(children)


def _worker(inbox: queue.Queue, outbox: queue.Queue, wid: int, search: _Search, cancel):
    while True:
        node = inbox.get()
        if node is None:
            return
        try:
            rel, clock = search.relax(node, cancel=cancel)
            outbox.put((wid, node, rel, clock, None))
        except Exception as exc:  # handed to the master
            outbox.put((wid, node, None, None, exc))


def solve_dfs_pool(inst: Instance, workers: int, params: SearchParams | None = None) -> SearchResult:
    """Master/worker variant. The master solves the root, owns the active
    list and branches; workers solve node relaxations they are sent.
    With one worker the explored sequence equals :func:`solve_dfs`."""
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    params = params or SearchParams()
    s = _Search(inst, params)
    done, active, root_bound = s.start_tree()
    if done is not None:
        done.workers = workers
        return done

    cancel = threading.Event()
    outbox: queue.Queue = queue.Queue()
    inboxes = [queue.Queue() for _ in range(workers)]
    threads = [
        threading.Thread(target=_worker, args=(inboxes[w], outbox, w, s, cancel), daemon=True, name=f"bnp-worker-{w}")
        for w in range(workers)
    ]
    for t in threads:
        t.start()
    idle = list(range(workers))
    inflight: dict[int, Node] = {}
    try:
        while True:
            s.check_budget(active, inflight.values())
            while idle and active:
                if params.observer is not None:
                    params.observer(list(active) + list(inflight.values()))
                w = idle.pop(0)
                node = _select(active)
                inflight[w] = node
                inboxes[w].put(node)
            if not inflight:
                raise SearchError("active list exhausted without an integral relaxation")
            w, node, rel, clock, exc = outbox.get()
            del inflight[w]
            idle.append(w)
            if exc is not None:
                if isinstance(exc, Cancelled):
                    continue
                raise exc
            s.absorb(node, rel, clock)
            if not rel.feasible:
                continue
            sol, children = s.examine(node, rel)
            if sol is not None:
                lb = lower_bound(list(active) + list(inflight.values()), rel.objective)
                return s.result(sol, lb, root_bound, workers=workers)
            active.extend(children)
    finally:
        cancel.set()
        for box in inboxes:
            box.put(None)
