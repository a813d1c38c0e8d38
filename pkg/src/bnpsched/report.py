"""Result rows, CSV persistence and benchmark aggregation."""
from __future__ import annotations

import csv
import math
from collections import defaultdict
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .metrics import amdahl

__all__ = ["RunRecord", "write_records", "read_records", "summarize", "speedup_table", "write_plot_data"]


@dataclass
class RunRecord:
    instance_id: str
    n: int
    m: int
    seed: int | None
    algorithm: str
    objective: int | None
    lb: float | None
    gap_lb_pct: float | None
    gap_sched_pct: float | None
    nodes_explored: int
    columns_generated: int
    wall_ms: float
    lanes: int
    workers: int
    strategy: str
    serial_ms: float | None = None
    status: str = "ok"


_INT = {"n", "m", "seed", "objective", "nodes_explored", "columns_generated", "lanes", "workers"}
_FLOAT = {"lb", "gap_lb_pct", "gap_sched_pct", "wall_ms", "serial_ms"}
HEADER = [f.name for f in fields(RunRecord)]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse(name, text):
    if text == "":
        return None if name not in ("instance_id", "algorithm", "strategy", "status") else ""
    if name in _INT:
        return int(text)
    if name in _FLOAT:
        return float(text)
    return text


def write_records(path, records, append: bool = True) -> Path:
    path = Path(path)
    new = not path.exists() or path.stat().st_size == 0 or not append
    with path.open("a" if append else "w", newline="") as fh:
        w = csv.writer(fh)
        if new:
            w.writerow(HEADER)
        for r in records:
            w.writerow([_fmt(getattr(r, k)) for k in HEADER])
    return path


def read_records(path) -> list[RunRecord]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for row in rows:
        missing = [k for k in HEADER if k not in row]
        if missing:
            raise ValueError(f"{path}: missing columns {missing}")
        out.append(RunRecord(**{k: _parse(k, row[k]) for k in HEADER}))
    return out


def _mean(vals):
    vals = [v for v in vals if v is not None]
    return sum(vals) / len(vals) if vals else None


def summarize(records) -> list[dict]:
    """Per (n, m, algorithm, lanes, workers) means of gaps, runtime and nodes."""
    records = list(records)
    if not records:
        raise ValueError("no result rows to aggregate")
    groups = defaultdict(list)
    for r in records:
        groups[(r.n, r.m, r.algorithm, r.lanes, r.workers)].append(r)
    out = []
    for (n, m, algo, lanes, workers), rs in sorted(groups.items()):
        ok = [r for r in rs if r.status == "ok"]
        out.append({
            "n": n,
            "m": m,
            "ratio": n / m,
            "algorithm": algo,
            "lanes": lanes,
            "workers": workers,
            "count": len(rs),
            "failed": len(rs) - len(ok),
            "mean_objective": _mean([r.objective for r in ok]),
            "mean_gap_lb_pct": _mean([r.gap_lb_pct for r in ok]),
            "max_gap_lb_pct": max((r.gap_lb_pct for r in ok if r.gap_lb_pct is not None), default=None),
            "mean_gap_sched_pct": _mean([r.gap_sched_pct for r in ok]),
            "mean_wall_ms": _mean([r.wall_ms for r in ok]),
            "mean_nodes": _mean([r.nodes_explored for r in ok]),
        })
    return out


def speedup_table(records) -> list[dict]:
    """Theoretical and observed speedups per size and lane count.

    The serial fraction is the mean share of serial time in the size's
    single-lane runs; observed speedup compares mean wall times.
    """
    groups = defaultdict(lambda: defaultdict(list))
    for r in records:
        if r.algorithm == "dfs" and r.status == "ok":
            groups[(r.n, r.m, r.workers)][r.lanes].append(r)
    out = []
    for (n, m, workers), by_lanes in sorted(groups.items()):
        ref = by_lanes.get(1)
        if not ref:
            continue
        t1 = _mean([r.wall_ms for r in ref])
        s = _mean([r.serial_ms / r.wall_ms for r in ref if r.serial_ms is not None and r.wall_ms > 0])
        for lanes in sorted(by_lanes):
            tk = _mean([r.wall_ms for r in by_lanes[lanes]])
            out.append({
                "n": n,
                "m": m,
                "workers": workers,
                "lanes": lanes,
                "serial_fraction": s,
                "theoretical": amdahl(s, lanes) if s is not None else None,
                "observed": t1 / tk if tk else None,
                "theoretical_inf": amdahl(s, math.inf) if s is not None else None,
            })
    return out


def _write_csv(path, rows):
    path = Path(path)
    if not rows:
        path.write_text("")
        return path
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(v) for k, v in r.items()})
    return path


def _write_dat(path, columns, rows):
    with Path(path).open("w") as fh:
        fh.write("# " + " ".join(columns) + "\n")
        for r in rows:
            fh.write(" ".join("nan" if r[c] is None else str(r[c]) for c in columns) + "\n")


def write_plot_data(outdir, records) -> list[Path]:
    """Summary CSVs plus whitespace-separated data files for plotting."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    summary = summarize(records)
    speed = speedup_table(records)
    written = [_write_csv(outdir / "summary.csv", summary), _write_csv(outdir / "speedup.csv", speed)]
    dfs1 = [r for r in summary if r["algorithm"] == "dfs" and r["lanes"] == 1 and r["workers"] <= 1]
    dfs1.sort(key=lambda r: r["ratio"])
    _write_dat(outdir / "gaps.dat", ["n", "m", "ratio", "mean_gap_lb_pct", "mean_gap_sched_pct"], dfs1)
    _write_dat(outdir / "runtime.dat", ["n", "m", "ratio", "mean_wall_ms"], dfs1)
    _write_dat(outdir / "lanes_runtime.dat", ["n", "m", "lanes", "observed", "theoretical"], speed)
    written += [outdir / "gaps.dat", outdir / "runtime.dat", outdir / "lanes_runtime.dat"]
    return written


def as_dict(r: RunRecord) -> dict:
    return asdict(r)
