"""
Cutting-plane solver for max/min E[max(Z1(x), Z2(x))].

Provides:
- Discretization grids and the closed-form bounding functions
- Baseline and enhanced RMP builders, big-M and bounding solves
- Supervalid inequalities and the primal heuristic
- No-good cuts and the solve() driver
"""

from solvers.cutting_plane.solver import SolveResult, SolveStatus, resolve_config, solve

__all__ = ['SolveResult', 'SolveStatus', 'resolve_config', 'solve']
