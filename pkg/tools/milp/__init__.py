"""
Mixed-integer linear models and the backends that solve them.

Provides:
- MilpModel / MilpOutcome and the Completion protocol
- FallbackBackend: selection enumeration with closed-form completion
- PulpBackend: CBC through PuLP
- get_milp_backend(name)
"""
from tools.milp.model import (
    VarKind,
    ModelSense,
    OutcomeStatus,
    Variable,
    Constraint,
    Objective,
    Completion,
    MilpModel,
    MilpOutcome,
    trivial_bound,
)
from tools.milp.fallback import FallbackBackend, SelectionEnumerator, fallback_solve_selection
from tools.milp.client import MilpBackend, get_milp_backend

__all__ = [
    "VarKind",
    "ModelSense",
    "OutcomeStatus",
    "Variable",
    "Constraint",
    "Objective",
    "Completion",
    "MilpModel",
    "MilpOutcome",
    "trivial_bound",
    "FallbackBackend",
    "SelectionEnumerator",
    "fallback_solve_selection",
    "MilpBackend",
    "get_milp_backend",
]
