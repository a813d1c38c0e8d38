"""Branch-and-price depth-first heuristic for unrelated parallel machine
scheduling with sequence- and machine-dependent setups, eligibility and a
total weighted completion time objective."""

from .baseline import brute_force, sched
from .colgen import CGParams, solve_relaxation
from .column import Column, FullSolution, evaluate, reduced_cost, satisfies, verify
from .constraints import NodeConstraints, predecessor_sets
from .instance import GenConfig, Instance, generate, horizon, load, save, validate
from .metrics import amdahl, gap_lb, gap_sched, measure
from .pricing import DualPrices, extract_columns, price, set_lanes
from .tree import SearchParams, SearchResult, solve_dfs, solve_dfs_pool

__version__ = "0.1.0"
