"""
A small mixed-integer linear model the RMP builders target.

Variables are referenced by name. Constraints flagged ``lazy`` are only
checked on complete selections by the fallback backend; external solvers
receive them as ordinary rows.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Protocol, Sequence, Tuple, Union

import numpy as np

from shared.config.constants import MILP_FEASIBILITY_TOLERANCE
from shared.errors import ModelError
from tools.instances.region import Relation

Terms = Union[Mapping[str, float], Iterable[Tuple[str, float]]]


class VarKind(str, Enum):
    """Variable domain."""
    BINARY = "binary"
    CONTINUOUS = "continuous"


class ModelSense(str, Enum):
    """Objective direction."""
    MAXIMIZE = "max"
    MINIMIZE = "min"


class OutcomeStatus(str, Enum):
    """Result of a MILP solve."""
    OPTIMAL = "optimal"
    FEASIBLE_WITH_BOUND = "feasible_with_bound"
    INFEASIBLE = "infeasible"
    TIME_LIMIT_NO_INCUMBENT = "time_limit_no_incumbent"


@dataclass(frozen=True)
class Variable:
    name: str
    kind: VarKind
    lower: float
    upper: float


@dataclass(frozen=True)
class Constraint:
    terms: Tuple[Tuple[str, float], ...]
    relation: Relation
    rhs: float
    name: str = ""
    lazy: bool = False

    def lhs(self, assignment: Mapping[str, float]) -> float:
        return sum(c * assignment[v] for v, c in self.terms)

    def violation(self, assignment: Mapping[str, float]) -> float:
        """Amount by which the assignment violates the constraint (0 if satisfied)."""
        lhs = self.lhs(assignment)
        if self.relation is Relation.LE:
            return max(0.0, lhs - self.rhs)
        if self.relation is Relation.GE:
            return max(0.0, self.rhs - lhs)
        return abs(lhs - self.rhs)


@dataclass(frozen=True)
class Objective:
    terms: Tuple[Tuple[str, float], ...]
    constant: float
    sense: ModelSense

    def value(self, assignment: Mapping[str, float]) -> float:
        return self.constant + sum(c * assignment[v] for v, c in self.terms)


class Completion(Protocol):
    """
    Closed-form completion of a model from its selection binaries.

    ``objective_values`` scores a (K, s) batch of selection rows (NaN where
    the selection admits no feasible completion); ``complete`` returns the
    full assignment of one row. ``cache_key`` identifies completions whose
    scores may be reused across solves (None disables reuse).
    """

    cache_key: Optional[object]

    def objective_values(self, selections: np.ndarray) -> np.ndarray: ...

    def complete(self, selection: np.ndarray) -> Dict[str, float]: ...


def _normalize_terms(terms: Terms) -> Tuple[Tuple[str, float], ...]:
    items = terms.items() if isinstance(terms, Mapping) else terms
    merged: Dict[str, float] = {}
    for name, coefficient in items:
        merged[name] = merged.get(name, 0.0) + float(coefficient)
    return tuple((name, c) for name, c in merged.items() if c != 0.0)


class MilpModel:
    """Mutable builder of a MILP; treat as read-only while it is being solved."""

    def __init__(self, name: str = ""):
        self.name = name
        self._variables: Dict[str, Variable] = {}
        self.constraints: List[Constraint] = []
        self.objective: Optional[Objective] = None
        self.selection: Optional[Tuple[str, ...]] = None
        self.completion: Optional[Completion] = None

    # Variables

    def add_variable(self, name: str, kind: VarKind, lower: float, upper: float) -> str:
        if name in self._variables:
            raise ModelError(f"duplicate variable {name}")
        if lower > upper:
            raise ModelError(f"variable {name} has lower bound {lower} above upper bound {upper}")
        self._variables[name] = Variable(name, VarKind(kind), float(lower), float(upper))
        return name

    def add_binary(self, name: str) -> str:
        return self.add_variable(name, VarKind.BINARY, 0.0, 1.0)

    def add_continuous(self, name: str, lower: float = -math.inf, upper: float = math.inf) -> str:
        return self.add_variable(name, VarKind.CONTINUOUS, lower, upper)

    def fix_variable(self, name: str, value: float) -> None:
        variable = self.variable(name)
        if not variable.lower <= value <= variable.upper:
            raise ModelError(f"cannot fix {name} to {value} outside its bounds")
        self._variables[name] = Variable(name, variable.kind, float(value), float(value))

    def variable(self, name: str) -> Variable:
        try:
            return self._variables[name]
        except KeyError:
            raise ModelError(f"unknown variable {name}") from None

    @property
    def variables(self) -> List[Variable]:
        return list(self._variables.values())

    @property
    def variable_names(self) -> List[str]:
        return list(self._variables)

    def count(self, kind: VarKind) -> int:
        return sum(1 for v in self._variables.values() if v.kind is kind)

    # Constraints and objective

    def add_constraint(
        self,
        terms: Terms,
        relation: Relation,
        rhs: float,
        name: str = "",
        lazy: bool = False,
    ) -> Constraint:
        normalized = _normalize_terms(terms)
        for variable_name, _ in normalized:
            if variable_name not in self._variables:
                raise ModelError(f"constraint {name or len(self.constraints)} references unknown variable {variable_name}")
        constraint = Constraint(normalized, Relation(relation), float(rhs), name, lazy)
        self.constraints.append(constraint)
        return constraint

    def set_objective(self, terms: Terms, sense: ModelSense, constant: float = 0.0) -> None:
        normalized = _normalize_terms(terms)
        for variable_name, _ in normalized:
            if variable_name not in self._variables:
                raise ModelError(f"objective references unknown variable {variable_name}")
        self.objective = Objective(normalized, float(constant), ModelSense(sense))

    def set_selection(self, names: Sequence[str], completion: Optional[Completion] = None) -> None:
        """Declare the selection binaries and, optionally, their closed-form completion."""
        for name in names:
            if self.variable(name).kind is not VarKind.BINARY:
                raise ModelError(f"selection variable {name} must be binary")
        self.selection = tuple(names)
        self.completion = completion

    # Checks

    def validate(self) -> None:
        """
        Raises:
            ModelError: If the objective is missing
        """
        if self.objective is None:
            raise ModelError(f"model {self.name or '<unnamed>'} has no objective")

    def violations(
        self,
        assignment: Mapping[str, float],
        tolerance: float = MILP_FEASIBILITY_TOLERANCE,
        include_lazy: bool = True,
    ) -> List[str]:
        """Names (or indices) of bounds and constraints the assignment violates."""
        problems = []
        for variable in self._variables.values():
            value = assignment.get(variable.name)
            if value is None:
                problems.append(f"{variable.name}: missing")
                continue
            if value < variable.lower - tolerance or value > variable.upper + tolerance:
                problems.append(f"{variable.name}: bound")
            if variable.kind is VarKind.BINARY and abs(value - round(value)) > tolerance:
                problems.append(f"{variable.name}: integrality")
        for index, constraint in enumerate(self.constraints):
            if constraint.lazy and not include_lazy:
                continue
            if constraint.violation(assignment) > tolerance:
                problems.append(constraint.name or f"constraint[{index}]")
        return problems

    def copy(self, name: Optional[str] = None) -> "MilpModel":
        clone = MilpModel(name if name is not None else self.name)
        clone._variables = dict(self._variables)
        clone.constraints = list(self.constraints)
        clone.objective = self.objective
        clone.selection = self.selection
        clone.completion = self.completion
        return clone

    def __repr__(self) -> str:
        return (
            f"MilpModel({self.name!r}, variables={len(self._variables)}, "
            f"constraints={len(self.constraints)})"
        )


@dataclass(frozen=True)
class MilpOutcome:
    """Result of a backend solve."""

    status: OutcomeStatus
    incumbent: Optional[Dict[str, float]] = None
    objective_value: Optional[float] = None
    dual_bound: Optional[float] = None
    wall_time: float = 0.0
    nodes: int = 0
    backend: str = ""
    notes: Dict[str, float] = field(default_factory=dict)

    @property
    def has_incumbent(self) -> bool:
        return self.status in (OutcomeStatus.OPTIMAL, OutcomeStatus.FEASIBLE_WITH_BOUND)

    def selection(self, names: Sequence[str]) -> np.ndarray:
        """Rounded values of the named binaries of the incumbent."""
        if self.incumbent is None:
            raise ModelError("outcome has no incumbent")
        return np.array([int(round(self.incumbent[name])) for name in names], dtype=np.int8)


def trivial_bound(model: MilpModel) -> float:
    """Objective bound from variable bounds alone (may be infinite)."""
    model.validate()
    maximize = model.objective.sense is ModelSense.MAXIMIZE
    total = model.objective.constant
    for name, coefficient in model.objective.terms:
        variable = model.variable(name)
        upward = (coefficient > 0) == maximize
        limit = variable.upper if upward else variable.lower
        total += coefficient * limit
    return total
