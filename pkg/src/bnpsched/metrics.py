"""Solution-quality gaps and parallel speedup accounting."""
from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["GapReport", "SpeedupRecord", "RunTiming", "gap_lb", "gap_sched", "gap_report", "amdahl", "measure"]


def gap_lb(z: float, lb: float) -> float:
    """Percent by which the heuristic value exceeds the lower bound, relative to the bound."""
    if not lb > 0:
        raise ValueError(f"lower bound must be positive, got {lb}")
    return 100.0 * (z - lb) / lb


def gap_sched(z_sched: float, z_dfs: float) -> float:
    """Percent improvement of the search over SCHED, relative to SCHED."""
    if not z_sched > 0:
        raise ValueError(f"SCHED objective must be positive, got {z_sched}")
    return 100.0 * (z_sched - z_dfs) / z_sched


@dataclass(frozen=True)
class GapReport:
    z_dfs: float
    lb: float
    z_sched: float
    gap_lb_pct: float
    gap_sched_pct: float
    convention: str = "gap_lb=(Z-LB)/LB with LB the frontier bound, gap_sched=(Z_SCHED-Z)/Z_SCHED"


def gap_report(z_dfs, lb, z_sched) -> GapReport:
    return GapReport(z_dfs, lb, z_sched, gap_lb(z_dfs, lb), gap_sched(z_sched, z_dfs))


def amdahl(s: float, k: float) -> float:
    """Theoretical speedup on ``k`` lanes for serial fraction ``s``; ``k`` may be ``inf``."""
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"serial fraction must lie in [0, 1], got {s}")
    if not k >= 1:
        raise ValueError(f"lane count must be >= 1, got {k}")
    if math.isinf(k):
        return math.inf if s == 0 else 1.0 / s
    return 1.0 / (s + (1.0 - s) / k)


@dataclass(frozen=True)
class RunTiming:
    """Wall time of one run split into serial and lane-parallel phases."""

    lanes: int
    wall: float
    serial: float
    parallel: float


@dataclass(frozen=True)
class SpeedupRecord:
    lanes: int
    wall: float
    serial_time: float
    parallel_time: float
    serial_fraction: float
    observed: float
    theoretical: float


def measure(reference: RunTiming | None, run: RunTiming) -> SpeedupRecord:
    """Compare ``run`` against the single-lane ``reference``.

    The serial fraction comes from the reference run's phase split.
    """
    if reference is None or reference.lanes != 1:
        raise ValueError("a 1-lane reference run is required")
    total = reference.serial + reference.parallel
    if total <= 0:
        raise ValueError("reference run has no recorded time")
    s = min(max(reference.serial / total, 0.0), 1.0)
    return SpeedupRecord(
        lanes=run.lanes,
        wall=run.wall,
        serial_time=run.serial,
        parallel_time=run.parallel,
        serial_fraction=s,
        observed=reference.wall / run.wall,
        theoretical=amdahl(s, run.lanes),
    )
