"""Command line: ``bnpsched generate | solve | bench``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import instance as inst_mod
from .baseline import OracleRefused, brute_force, sched
from .column import verify
from .instance import GenConfig, InstanceError
from .metrics import gap_lb, gap_sched
from .report import RunRecord, read_records, write_plot_data, write_records
from .tree import SearchBudgetExceeded, SearchError, SearchParams, solve_dfs, solve_dfs_pool

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_INVARIANT = 0, 1, 2, 3

# machine counts used for the n=300 study
STUDY_MACHINES = (30, 45, 60, 75, 100, 150, 300)

log = logging.getLogger("bnpsched")


class UsageError(Exception):
    pass


def parse_sizes(text: str) -> list[tuple[int, int]]:
    """``"100/10,100/20"``, ``"300/30..300/300"`` (machine counts of the
    n=300 study inside the range) or ``"full"``."""
    if text.strip() == "full":
        return [(300, m) for m in STUDY_MACHINES]
    out = []
    for part in text.split(","):
        part = part.strip()
        try:
            if ".." in part:
                lo, hi = part.split("..")
                n1, m1 = map(int, lo.split("/"))
                n2, m2 = map(int, hi.split("/"))
                if n1 != n2:
                    raise UsageError(f"size range {part!r} must keep n fixed")
                out += [(n1, m) for m in STUDY_MACHINES if m1 <= m <= m2]
            else:
                n, m = map(int, part.split("/"))
                out.append((n, m))
        except ValueError:
            raise UsageError(f"cannot parse size {part!r}; expected n/m") from None
    if not out:
        raise UsageError(f"no sizes in {text!r}")
    return out


def derive_seed(base: int, n: int, m: int, idx: int) -> int:
    return int(np.random.SeedSequence([base, n, m, idx]).generate_state(1)[0])


def cmd_generate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    sizes = parse_sizes(args.sizes)
    if args.count < 1:
        raise UsageError("--count must be >= 1")
    for n, m in sizes:
        for idx in range(args.count):
            seed = derive_seed(args.seed, n, m, idx)
            cfg = GenConfig(n=n, m=m, prob=args.prob, seed=seed)
            inst = replace(inst_mod.generate(cfg), name=f"n{n}_m{m}_{idx:02d}")
            path = inst_mod.save(inst, out / f"{inst.name}.json")
            log.info("wrote %s", path)
    print(f"generated {len(sizes) * args.count} instances in {out}")
    return EXIT_OK


def _instance_paths(names: list[str]) -> list[Path]:
    paths = []
    for s in names:
        p = Path(s)
        if p.is_dir():
            paths += sorted(p.glob("*.json"))
        elif p.exists():
            paths.append(p)
        else:
            raise UsageError(f"instance path {s} does not exist")
    if not paths:
        raise UsageError("no instance files given")
    return paths


def _record(inst, algo, strategy, lanes, workers, **kw) -> RunRecord:
    base = dict(
        instance_id=inst.name, n=inst.n, m=inst.m, seed=inst.seed, algorithm=algo,
        objective=None, lb=None, gap_lb_pct=None, gap_sched_pct=None, nodes_explored=0,
        columns_generated=0, wall_ms=0.0, lanes=lanes, workers=workers, strategy=strategy,
    )
    base.update(kw)
    return RunRecord(**base)


def solve_one(inst, args) -> tuple[list[RunRecord], int]:
    rows, code = [], EXIT_OK
    lanes, workers = args.lanes, args.workers
    t0 = time.perf_counter()
    z_sched = sched(inst).objective
    sched_ms = 1000 * (time.perf_counter() - t0)
    if args.algo in ("sched", "both"):
        rows.append(_record(inst, "sched", "greedy", 1, 0, objective=z_sched, wall_ms=sched_ms))
    if args.algo in ("dfs", "both"):
        params = SearchParams(
            eps=args.eps, int_tol=args.int_tol, lanes=lanes,
            node_budget=args.node_budget, time_budget=args.time_budget,
        )
        strategy = "pool" if workers >= 1 else "serial"
        t0 = time.perf_counter()
        try:
            res = solve_dfs_pool(inst, workers, params) if workers >= 1 else solve_dfs(inst, params)
        except SearchBudgetExceeded as exc:
            log.warning("%s: %s", inst.name, exc)
            lb = exc.lower_bound if np.isfinite(exc.lower_bound) else None
            rows.append(_record(
                inst, "dfs", strategy, lanes, workers, lb=lb, nodes_explored=exc.nodes_explored,
                wall_ms=1000 * (time.perf_counter() - t0), status="budget",
            ))
            return rows, EXIT_BUDGET
        rows.append(_record(
            inst, "dfs", strategy, lanes, workers, objective=res.objective, lb=res.lower_bound,
            gap_lb_pct=gap_lb(res.objective, res.lower_bound), gap_sched_pct=gap_sched(z_sched, res.objective),
            nodes_explored=res.nodes_explored, columns_generated=res.columns_generated,
            wall_ms=1000 * res.wall_time, serial_ms=1000 * res.serial_time,
        ))
    if args.algo == "oracle":
        t0 = time.perf_counter()
        opt, sol = brute_force(inst)
        if verify(inst, sol) != opt:
            raise SearchError("oracle solution failed verification")
        rows.append(_record(
            inst, "oracle", "exhaustive", 1, 0, objective=opt, lb=float(opt), gap_lb_pct=0.0,
            gap_sched_pct=gap_sched(z_sched, opt), wall_ms=1000 * (time.perf_counter() - t0),
        ))
    return rows, code


def cmd_solve(args) -> int:
    if args.lanes < 1 or args.workers < 0:
        raise UsageError("--lanes must be >= 1 and --workers >= 0")
    code = EXIT_OK
    for path in _instance_paths(args.instance):
        inst = inst_mod.load(path)
        if not inst.name:
            inst = replace(inst, name=path.stem)
        rows, rc = solve_one(inst, args)
        code = max(code, rc)
        for r in rows:
            print(f"{r.instance_id} {r.algorithm}: objective={r.objective} lb={r.lb} "
                  f"gap_lb={r.gap_lb_pct} gap_sched={r.gap_sched_pct} wall_ms={r.wall_ms:.1f} status={r.status}")
        if args.results:
            write_records(args.results, rows)
    return code


def cmd_bench(args) -> int:
    records = []
    for p in args.results:
        records += read_records(p)
    if not records:
        raise UsageError("no result rows found")
    for path in write_plot_data(args.out, records):
        print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bnpsched", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write random instances")
    g.add_argument("--sizes", required=True, help='e.g. "100/10,100/20", "300/30..300/300" or "full"')
    g.add_argument("--count", type=int, default=10)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--prob", type=float, default=0.2, help="eligibility probability")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="solve instances and append result rows")
    s.add_argument("--instance", nargs="+", required=True, help="instance files or directories")
    s.add_argument("--algo", choices=["dfs", "sched", "both", "oracle"], default="both")
    s.add_argument("--lanes", type=int, default=1)
    s.add_argument("--workers", type=int, default=0, help="0 runs the serial search")
    s.add_argument("--eps", type=float, default=1e-7)
    s.add_argument("--int-tol", type=float, default=1e-6)
    s.add_argument("--node-budget", type=int, default=1_000_000)
    s.add_argument("--time-budget", type=float, default=None, help="seconds")
    s.add_argument("--results", default=None, help="CSV file to append to")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="aggregate result rows into tables and plot data")
    b.add_argument("--results", nargs="+", required=True)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("BNPSCHED_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, InstanceError, OracleRefused, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SearchError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
