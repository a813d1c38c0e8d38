"""Dense revised simplex for the restricted master problems.

Solves ::

    min  c x
    s.t. A_eq x  = b_eq
         A_le x <= b_le
         x >= 0

with big-M artificials on the equality rows. Internally the variables are
laid out as ``[artificials | slacks | structurals]`` so that basis indices of
artificials and slacks stay valid while columns are appended between
solves; a returned basis can be passed back as a warm start.

Two backends share that formulation: the built-in simplex (``method=
"simplex"``) and HiGHS (``method="highs"``). :class:`IncrementalMaster`
keeps a HiGHS model alive across column additions, which is what column
generation uses on large masters where the dense simplex stalls on
degenerate pivots.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

__all__ = ["LpProblem", "LpSolution", "LpError", "IncrementalMaster", "solve"]

logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-9
OPT_TOL = 1e-9
ART_TOL = 1e-7  # artificial level that signals infeasibility
HARRIS_TOL = 1e-9
BLAND_AFTER = 50
REFACTOR_EVERY = 50


class LpError(RuntimeError):
    """Solver failure: iteration limit, unboundedness or a singular basis."""


def _as_matrix(A, nv):
    A = np.asarray(A, dtype=float)
    if A.ndim == 2:
        if A.shape[1] != nv:
            raise ValueError(f"matrix has {A.shape[1]} columns, expected {nv}")
        return A
    return A.reshape(-1, nv) if nv else A.reshape(0, 0)


@dataclass
class LpProblem:
    c: np.ndarray
    A_eq: np.ndarray
    A_le: np.ndarray
    big_m: float
    b_eq: np.ndarray | None = None
    b_le: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        nv = self.c.shape[0]
        self.A_eq = _as_matrix(self.A_eq, nv)
        self.A_le = _as_matrix(self.A_le, nv)
        if self.b_eq is None:
            self.b_eq = np.ones(self.A_eq.shape[0])
        if self.b_le is None:
            self.b_le = np.ones(self.A_le.shape[0])
        self.b_eq = np.asarray(self.b_eq, dtype=float)
        self.b_le = np.asarray(self.b_le, dtype=float)
        if (self.b_eq < 0).any() or (self.b_le < 0).any():
            raise ValueError("right-hand sides must be nonnegative")

    @property
    def n_eq(self):
        return self.A_eq.shape[0]

    @property
    def n_le(self):
        return self.A_le.shape[0]

    @property
    def n_var(self):
        return self.c.shape[0]


@dataclass
class LpSolution:
    status: str  # "optimal" or "infeasible"
    x: np.ndarray
    objective: float
    pi: np.ndarray  # equality-row duals
    sigma: np.ndarray  # at-most-row duals, <= 0 at optimality
    basis: np.ndarray
    iterations: int
    artificial: np.ndarray  # artificial values
    b_eq: np.ndarray = field(repr=False, default=None)
    b_le: np.ndarray = field(repr=False, default=None)

    @property
    def dual_objective(self) -> float:
        return float(self.b_eq @ self.pi + self.b_le @ self.sigma)


def _full_system(prob: LpProblem):
    ne, nl, nv = prob.n_eq, prob.n_le, prob.n_var
    r = ne + nl
    A = np.zeros((r, ne + nl + nv))
    A[:ne, :ne] = np.eye(ne)
    A[ne:, ne:ne + nl] = np.eye(nl)
    A[:ne, ne + nl:] = prob.A_eq
    A[ne:, ne + nl:] = prob.A_le
    cost = np.concatenate((np.full(ne, float(prob.big_m)), np.zeros(nl), prob.c))
    b = np.concatenate((prob.b_eq, prob.b_le))
    return A, cost, b


def solve(prob: LpProblem, basis=None, max_iter: int = 50_000, method: str = "simplex") -> LpSolution:
    """Primal revised simplex; Dantzig pricing, Bland's rule on stalling.

    ``basis`` is an optional warm start (indices in the internal layout, as
    returned in :attr:`LpSolution.basis`). It is ignored if singular or
    primal infeasible.
    """
    if method == "highs":
        master = IncrementalMaster(prob.n_eq, prob.n_le, prob.big_m, prob.b_eq, prob.b_le)
        master.add_columns(prob.c, prob.A_eq, prob.A_le)
        return master.solve()
    if method != "simplex":
        raise ValueError(f"unknown LP method {method!r}")
    A, cost, b = _full_system(prob)
    r, N = A.shape
    ne = prob.n_eq

    B = None
    if basis is not None:
        B = np.array(basis, dtype=int)
        if B.shape != (r,) or len(set(B.tolist())) != r or B.max(initial=-1) >= N:
            B = None
        else:
            try:
                Binv = np.linalg.inv(A[:, B])
                xB = Binv @ b
                if (xB < -FEAS_TOL).any() or not np.isfinite(xB).all():
                    B = None
            except np.linalg.LinAlgError:
                B = None
    if B is None:
        B = np.arange(r)
        Binv = np.eye(r)
        xB = b.copy()

    absA = np.abs(A)
    absc = 1.0 + np.abs(cost)
    in_basis = np.zeros(N, dtype=bool)
    in_basis[B] = True
    degenerate = 0
    since_refactor = 0
    it = 0
    while True:
        if it >= max_iter:
            raise LpError(f"simplex iteration limit of {max_iter} exceeded")
        y = cost[B] @ Binv
        d = cost - y @ A
        d[in_basis] = 0.0
        bland = degenerate >= BLAND_AFTER
        # tolerance relative to the magnitudes that produced each reduced cost
        cand = np.flatnonzero(d < -OPT_TOL * (absc + np.abs(y) @ absA))
        if cand.size == 0:
            break
        q = int(cand[0]) if bland else int(cand[np.argmin(d[cand])])
        u = Binv @ A[:, q]
        rows = np.flatnonzero(u > PIVOT_TOL)
        if rows.size == 0:
            raise LpError(f"problem is unbounded along variable {q}")
        ratios = xB[rows] / u[rows]
        if bland:
            theta = ratios.min()
            ties = rows[ratios <= theta + 1e-12 * max(1.0, abs(theta))]
            p = int(ties[np.argmin(B[ties])])
        else:
            # Harris two-pass test: largest pivot among rows within tolerance
            bound = ((xB[rows] + HARRIS_TOL) / u[rows]).min()
            ties = rows[ratios <= bound]
            p = int(ties[np.argmax(u[ties])])
        theta = max(xB[p] / u[p], 0.0)
        degenerate = degenerate + 1 if theta <= FEAS_TOL else 0

        xB = xB - theta * u
        xB[p] = theta
        in_basis[B[p]] = False
        in_basis[q] = True
        B[p] = q
        since_refactor += 1
        if since_refactor >= REFACTOR_EVERY:
            try:
                Binv = np.linalg.inv(A[:, B])
            except np.linalg.LinAlgError:
                raise LpError("basis became singular during refactorization") from None
            xB = Binv @ b
            since_refactor = 0
        else:
            piv = u[p]
            row = Binv[p] / piv
            Binv -= np.outer(u, row)
            Binv[p] = row
        np.maximum(xB, 0.0, out=xB)
        it += 1

    # final clean refactorization for accurate values and duals
    Binv = np.linalg.inv(A[:, B])
    xB = np.maximum(Binv @ b, 0.0)
    y = cost[B] @ Binv
    xfull = np.zeros(N)
    xfull[B] = xB
    art = xfull[:ne]
    x = xfull[ne + prob.n_le:]
    status = "infeasible" if (art > ART_TOL).any() else "optimal"
    obj = float(prob.c @ x) if status == "optimal" else float(cost @ xfull)
    sol = LpSolution(
        status=status,
        x=x,
        objective=obj,
        pi=y[:ne].copy(),
        sigma=y[ne:].copy(),
        basis=B.copy(),
        iterations=it,
        artificial=art.copy(),
        b_eq=prob.b_eq,
        b_le=prob.b_le,
    )
    logger.debug("lp solved: %s obj=%.6f after %d pivots", status, obj, it)
    return sol


class IncrementalMaster:
    """HiGHS model of the big-M master that grows by columns.

    Every :meth:`solve` restarts from the previous optimal basis.
    """

    def __init__(self, n_eq, n_le, big_m, b_eq=None, b_le=None):
        import highspy

        self.n_eq, self.n_le = int(n_eq), int(n_le)
        self.b_eq = np.ones(self.n_eq) if b_eq is None else np.asarray(b_eq, float)
        self.b_le = np.ones(self.n_le) if b_le is None else np.asarray(b_le, float)
        self.n_var = 0
        h = self._h = highspy.Highs()
        h.setOptionValue("output_flag", False)
        h.setOptionValue("threads", 1)
        h.setOptionValue("presolve", "off")
        h.setOptionValue("solver", "simplex")
        inf = highspy.kHighsInf
        r = self.n_eq + self.n_le
        lower = np.concatenate((self.b_eq, np.full(self.n_le, -inf)))
        upper = np.concatenate((self.b_eq, self.b_le))
        h.addRows(r, lower, upper, 0, np.zeros(r, np.int32), np.zeros(0, np.int32), np.zeros(0))
        idx = np.arange(self.n_eq, dtype=np.int32)
        h.addCols(
            self.n_eq, np.full(self.n_eq, float(big_m)), np.zeros(self.n_eq), np.full(self.n_eq, inf),
            self.n_eq, idx, idx, np.ones(self.n_eq),
        )

    def add_columns(self, c, A_eq, A_le) -> None:
        import highspy

        c = np.asarray(c, float)
        k = c.shape[0]
        if k == 0:
            return
        M = np.vstack((np.asarray(A_eq, float).reshape(self.n_eq, k), np.asarray(A_le, float).reshape(self.n_le, k)))
        starts, index, value = [], [], []
        for v in range(k):
            nz = np.flatnonzero(M[:, v])
            starts.append(len(index))
            index.extend(nz.tolist())
            value.extend(M[nz, v].tolist())
        self._h.addCols(
            k, c, np.zeros(k), np.full(k, highspy.kHighsInf), len(index),
            np.asarray(starts, np.int32), np.asarray(index, np.int32), np.asarray(value, float),
        )
        self.n_var += k

    def solve(self) -> LpSolution:
        import highspy

        h = self._h
        h.run()
        status = h.getModelStatus()
        if status != highspy.HighsModelStatus.kOptimal:
            raise LpError(f"HiGHS returned {h.modelStatusToString(status)}")
        sol = h.getSolution()
        cols = np.asarray(sol.col_value)
        y = np.asarray(sol.row_dual)
        art = np.maximum(cols[: self.n_eq], 0.0)
        x = np.maximum(cols[self.n_eq:], 0.0)
        basic = h.getBasis()
        B = [v for v, st in enumerate(basic.col_status) if st == highspy.HighsBasisStatus.kBasic]
        # internal layout: artificials, slacks, structurals
        B = [v if v < self.n_eq else v + self.n_le for v in B]
        B += [self.n_eq + r for r, st in enumerate(basic.row_status)
              if r >= self.n_eq and st == highspy.HighsBasisStatus.kBasic]
        infeasible = (art > ART_TOL).any()
        obj = float(h.getInfo().objective_function_value)
        if not infeasible:
            obj -= float(self._h.getLp().col_cost_[: self.n_eq] @ art)
        return LpSolution(
            status="infeasible" if infeasible else "optimal",
            x=x,
            objective=obj,
            pi=y[: self.n_eq].copy(),
            sigma=y[self.n_eq:].copy(),
            basis=np.asarray(sorted(B)),
            iterations=int(h.getInfo().simplex_iteration_count),
            artificial=art,
            b_eq=self.b_eq,
            b_le=self.b_le,
        )
