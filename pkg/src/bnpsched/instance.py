"""Problem data for unrelated parallel machine scheduling with setups.

Jobs are numbered ``1..n``; index ``0`` is the fictitious start job. All
arrays are stored with that job numbering so that ``p[k, j]`` is the
processing time of job ``j`` on machine ``k`` and ``s[k, i, j]`` is the
setup incurred when ``j`` directly follows ``i`` on ``k``. Machines are
numbered ``0..m-1``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Instance",
    "GenConfig",
    "InstanceError",
    "generate",
    "validate",
    "horizon",
    "save",
    "load",
    "to_dict",
    "from_dict",
]


class InstanceError(ValueError):
    """Raised for malformed or invalid instance data."""


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Instance:
    """Immutable scheduling instance.

    Attributes
    ----------
    w : (n+1,) int array, ``w[0] == 0``
    elig : (m, n+1) bool array, ``elig[:, 0]`` is False
    p : (m, n+1) int array, ``p[:, 0] == 0``
    s : (m, n+1, n+1) int array; ``s[k, i, j]`` for predecessor ``i``
    """

    w: np.ndarray
    elig: np.ndarray
    p: np.ndarray
    s: np.ndarray
    name: str = ""
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "w", _frozen(self.w, np.int64))
        object.__setattr__(self, "elig", _frozen(self.elig, bool))
        object.__setattr__(self, "p", _frozen(self.p, np.int64))
        object.__setattr__(self, "s", _frozen(self.s, np.int64))
        m, n1 = self.elig.shape
        if self.w.shape != (n1,) or self.p.shape != (m, n1) or self.s.shape != (m, n1, n1):
            raise InstanceError(
                f"inconsistent array shapes: w{self.w.shape} elig{self.elig.shape} "
                f"p{self.p.shape} s{self.s.shape}"
            )

    @property
    def n(self) -> int:
        return self.elig.shape[1] - 1

    @property
    def m(self) -> int:
        return self.elig.shape[0]

    def jobs_on(self, k: int) -> np.ndarray:
        """Job ids eligible on machine ``k`` in increasing order."""
        return np.flatnonzero(self.elig[k])

    def machines_for(self, j: int) -> np.ndarray:
        return np.flatnonzero(self.elig[:, j])

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.name == other.name
            and self.seed == other.seed
            and np.array_equal(self.w, other.w)
            and np.array_equal(self.elig, other.elig)
            and np.array_equal(self.p * self.elig, other.p * other.elig)
            and np.array_equal(self.s, other.s)
        )

    __hash__ = None

    def __repr__(self):
        return f"Instance(name={self.name!r}, n={self.n}, m={self.m})"

    @classmethod
    def from_job_arrays(cls, weights, eligible, processing, setup, **kw) -> "Instance":
        """Build from 0-based job arrays as they appear in instance files.

        ``weights`` (n,), ``eligible`` and ``processing`` (m, n),
        ``setup`` (m, n+1, n) with predecessor row 0 the fictitious job.
        """
        weights = np.asarray(weights)
        eligible = np.asarray(eligible, dtype=bool)
        processing = np.asarray(processing)
        setup = np.asarray(setup)
        m, n = eligible.shape
        w = np.zeros(n + 1, dtype=np.int64)
        w[1:] = weights
        elig = np.zeros((m, n + 1), dtype=bool)
        elig[:, 1:] = eligible
        p = np.zeros((m, n + 1), dtype=np.int64)
        p[:, 1:] = processing
        s = np.zeros((m, n + 1, n + 1), dtype=np.int64)
        s[:, :, 1:] = setup
        return cls(w=w, elig=elig, p=p, s=s, **kw)


@dataclass(frozen=True)
class GenConfig:
    """Random instance parameters; integer ranges are inclusive."""

    n: int
    m: int
    p_range: tuple[int, int] = (10, 100)
    s_range: tuple[int, int] = (0, 10)
    w_range: tuple[int, int] = (1, 10)
    prob: float = 0.2
    seed: int = 0

    def problems(self) -> list[str]:
        out = []
        if self.n < 1:
            out.append(f"n must be >= 1, got {self.n}")
        if self.m < 1:
            out.append(f"m must be >= 1, got {self.m}")
        for label, (lo, hi), floor in (
            ("p_range", self.p_range, 1),
            ("s_range", self.s_range, 0),
            ("w_range", self.w_range, 1),
        ):
            if lo > hi:
                out.append(f"{label} is empty: {lo} > {hi}")
            if lo < floor:
                out.append(f"{label} lower bound must be >= {floor}, got {lo}")
        if not 0.0 < self.prob <= 1.0:
            out.append(f"prob must lie in (0, 1], got {self.prob}")
        return out


def generate(config: GenConfig) -> Instance:
    """Draw a random instance.

    Processing, setup (including initial setups from job 0) and weights are
    uniform integers over their ranges; each machine/job pair is eligible
    independently with probability ``config.prob``. A job left without any
    eligible machine gets one machine drawn uniformly from the same stream.
    """
    problems = config.problems()
    if problems:
        raise InstanceError("invalid GenConfig: " + "; ".join(problems))
    n, m = config.n, config.m
    rng = np.random.default_rng(config.seed)
    p = rng.integers(config.p_range[0], config.p_range[1], size=(m, n), endpoint=True)
    s = rng.integers(config.s_range[0], config.s_range[1], size=(m, n + 1, n), endpoint=True)
    w = rng.integers(config.w_range[0], config.w_range[1], size=n, endpoint=True)
    elig = rng.random((m, n)) < config.prob
    for j in range(n):
        if not elig[:, j].any():
            elig[rng.integers(m), j] = True
    # a job never directly follows itself
    for j in range(n):
        s[:, j + 1, j] = 0
    return Instance.from_job_arrays(
        w, elig, p, s, name=f"n{n}_m{m}_s{config.seed}", seed=int(config.seed)
    )


def validate(inst: Instance) -> list[str]:
    """Return one diagnostic per violated invariant; empty means valid."""
    diags = []
    n, m = inst.n, inst.m
    if n < 1:
        diags.append(f"instance has n={n}; at least one job is required")
    if m < 1:
        diags.append(f"instance has m={m}; at least one machine is required")
    if inst.elig[:, 0].any():
        diags.append("fictitious job 0 must not be eligible on any machine")
    for j in range(1, n + 1):
        if inst.w[j] < 1:
            diags.append(f"job {j}: weight {inst.w[j]} violates weight bound w >= 1")
        if not inst.elig[:, j].any():
            diags.append(f"job {j}: no eligible machine")
    for k in range(m):
        for j in inst.jobs_on(k):
            if inst.p[k, j] < 1:
                diags.append(
                    f"machine {k}, job {j}: processing time {inst.p[k, j]} must be >= 1"
                )
        preds = np.concatenate(([0], inst.jobs_on(k)))
        for j in inst.jobs_on(k):
            bad = [int(i) for i in preds if i != j and inst.s[k, i, j] < 0]
            if bad:
                diags.append(f"machine {k}, job {j}: negative setup from predecessors {bad}")
    return diags


def horizon(inst: Instance) -> int:
    """Upper bound on the makespan of any machine in any feasible solution.

    Each machine contributes the sum over its eligible jobs of the processing
    time plus the largest setup from any possible predecessor.
    """
    best = 0
    for k in range(inst.m):
        jobs = inst.jobs_on(k)
        if jobs.size == 0:
            continue
        preds = np.concatenate(([0], jobs))
        total = 0
        for j in jobs:
            cand = preds[preds != j]
            total += int(inst.p[k, j]) + int(inst.s[k, cand, j].max())
        best = max(best, total)
    return best


def to_dict(inst: Instance) -> dict:
    d = {
        "n": inst.n,
        "m": inst.m,
        "weights": inst.w[1:].tolist(),
        "eligible": inst.elig[:, 1:].tolist(),
        "processing": (inst.p[:, 1:] * inst.elig[:, 1:]).tolist(),
        "setup": inst.s[:, :, 1:].tolist(),
    }
    if inst.name:
        d["name"] = inst.name
    if inst.seed is not None:
        d["seed"] = inst.seed
    return d


def _shape_error(key, expected, got):
    return InstanceError(f"field {key!r}: expected shape {expected}, got {got}")


def from_dict(d: dict, *, check: bool = True) -> Instance:
    """Parse the JSON object layout; raises :class:`InstanceError`."""
    for key in ("n", "m", "weights", "eligible", "processing", "setup"):
        if key not in d:
            raise InstanceError(f"missing field {key!r}")
    n, m = d["n"], d["m"]
    if not isinstance(n, int) or not isinstance(m, int):
        raise InstanceError("fields 'n' and 'm' must be integers")
    if n < 1 or m < 1:
        raise InstanceError(f"validation error: n={n}, m={m}; both must be >= 1")

    def arr(key, shape, dtype):
        try:
            a = np.array(d[key], dtype=dtype)
        except (TypeError, ValueError) as exc:
            raise InstanceError(f"field {key!r}: {exc}") from None
        if a.shape != shape:
            raise _shape_error(key, shape, a.shape)
        return a

    w = arr("weights", (n,), np.int64)
    elig = arr("eligible", (m, n), bool)
    p = arr("processing", (m, n), np.int64)
    setup = d["setup"]
    # walk the nested lists so a missing entry is reported with its location
    if not isinstance(setup, list) or len(setup) != m:
        raise _shape_error("setup", (m, n + 1, n), f"{len(setup) if isinstance(setup, list) else '?'} machines")
    for k, rows in enumerate(setup):
        if not isinstance(rows, list) or len(rows) != n + 1:
            raise InstanceError(f"field 'setup'[{k}]: expected {n + 1} predecessor rows")
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != n:
                raise InstanceError(
                    f"field 'setup'[{k}][{i}]: expected {n} entries, "
                    f"got {len(row) if isinstance(row, list) else type(row).__name__}"
                )
    s = arr("setup", (m, n + 1, n), np.int64)
    inst = Instance.from_job_arrays(
        w, elig, p * elig, s, name=d.get("name", ""), seed=d.get("seed")
    )
    if check:
        diags = validate(inst)
        if diags:
            raise InstanceError("validation error: " + "; ".join(diags))
    return inst


def save(inst: Instance, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(to_dict(inst), separators=(",", ":")))
    return path


def load(path, *, check: bool = True) -> Instance:
    path = Path(path)
    try:
        d = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(d, dict):
        raise InstanceError(f"{path}: top level must be a JSON object")
    try:
        return from_dict(d, check=check)
    except InstanceError as exc:
        raise InstanceError(f"{path}: {exc}") from None
