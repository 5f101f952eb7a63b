"""
Independent ground truth for the cutting-plane solver.

Provides:
- brute_force / feasible_batches: exhaustive enumeration of Omega
- monte_carlo: sampled estimate of the objective
- min_cut_brute_force and build_mincut_reduction
"""

from solvers.oracle.enumeration import OracleResult, brute_force, feasible_batches
from solvers.oracle.monte_carlo import monte_carlo
from solvers.oracle.mincut import MinCutResult, build_mincut_reduction, min_cut_brute_force, reduction_cut_weight

__all__ = [
    'OracleResult',
    'brute_force',
    'feasible_batches',
    'monte_carlo',
    'MinCutResult',
    'build_mincut_reduction',
    'min_cut_brute_force',
    'reduction_cut_weight',
]
