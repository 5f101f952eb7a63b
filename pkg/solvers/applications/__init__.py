"""
Instance generators and checks for the featured applications.

Provides:
- gen_knapsack: two knapsacks with correlated item values
- gen_makespan / deterministic_makespan_opt: two-machine scheduling
- dfs_region, build_dfs_instance, gen_dfs, decode_rosters, dfs_benchmark_pair
- check_theorem2 / check_theorem3 for independent makespan instances
- benchmark, summarize_benchmark and CSV rendering
"""

from solvers.applications.knapsack import gen_knapsack
from solvers.applications.makespan import deterministic_makespan_opt, gen_makespan
from solvers.applications.dfs import (
    Roster,
    build_dfs_instance,
    decode_rosters,
    dfs_benchmark_pair,
    dfs_region,
    gen_dfs,
)
from solvers.applications.theorems import check_theorem2, check_theorem3, scale_for_uniform_delta
from solvers.applications.benchmark import benchmark, benchmark_csv, omit_timing, summarize_benchmark, summary_csv

__all__ = [
    'gen_knapsack',
    'gen_makespan',
    'deterministic_makespan_opt',
    'Roster',
    'build_dfs_instance',
    'decode_rosters',
    'dfs_benchmark_pair',
    'dfs_region',
    'gen_dfs',
    'check_theorem2',
    'check_theorem3',
    'scale_for_uniform_delta',
    'benchmark',
    'benchmark_csv',
    'omit_timing',
    'summarize_benchmark',
    'summary_csv',
]
