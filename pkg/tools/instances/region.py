"""
Linear feasible regions over the 2 x n selection binaries.

Index convention: i in {0, 1} selects the row, j in {0..n-1} the component.
Flattened selections are row-major, so (i, j) maps to column i * n + j.
"""
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, Iterable, Mapping, Optional, Tuple

import numpy as np

from shared.config.constants import FEASIBILITY_TOLERANCE
from shared.errors import DimensionMismatchError
from tools.gaussian.types import SelectionPair


class Relation(str, Enum):
    """Constraint relation."""
    LE = "le"
    EQ = "eq"
    GE = "ge"


Index = Tuple[int, int]


@dataclass(frozen=True)
class LinearConstraint:
    """sum of coeffs[(i, j)] * x[i, j]  (relation)  rhs."""

    terms: Tuple[Tuple[int, int, float], ...]
    relation: Relation
    rhs: float
    name: str = ""

    def __post_init__(self):
        cleaned = tuple(sorted((int(i), int(j), float(c)) for i, j, c in self.terms if c != 0))
        if not cleaned:
            raise ValueError(f"constraint {self.name or '<unnamed>'} has no nonzero coefficient")
        keys = [(i, j) for i, j, _ in cleaned]
        if len(set(keys)) != len(keys):
            raise ValueError(f"constraint {self.name or '<unnamed>'} repeats an index")
        for i, j, _ in cleaned:
            if i not in (0, 1) or j < 0:
                raise DimensionMismatchError(f"constraint index ({i}, {j}) out of range")
        object.__setattr__(self, "terms", cleaned)
        object.__setattr__(self, "relation", Relation(self.relation))
        object.__setattr__(self, "rhs", float(self.rhs))

    @property
    def coeffs(self) -> Dict[Index, float]:
        return {(i, j): c for i, j, c in self.terms}

    @property
    def max_column(self) -> int:
        return max(j for _, j, _ in self.terms)

    @property
    def integral(self) -> bool:
        values = [c for _, _, c in self.terms] + [self.rhs]
        return all(float(v).is_integer() for v in values)

    def holds(self, lhs: float) -> bool:
        """Check a left-hand-side value against the relation."""
        tol = 0.0 if self.integral else FEASIBILITY_TOLERANCE
        if self.relation is Relation.LE:
            return lhs <= self.rhs + tol
        if self.relation is Relation.GE:
            return lhs >= self.rhs - tol
        return abs(lhs - self.rhs) <= tol


@dataclass(frozen=True, eq=False)
class FeasibleRegion:
    """Omega: an ordered list of linear constraints on a 2 x n selection."""

    n: int
    constraints: Tuple[LinearConstraint, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.n < 1:
            raise DimensionMismatchError(f"region needs n >= 1, got {self.n}")
        for constraint in self.constraints:
            if constraint.max_column >= self.n:
                raise DimensionMismatchError(
                    f"constraint {constraint.name or '<unnamed>'} references column "
                    f"{constraint.max_column} but n={self.n}"
                )

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeasibleRegion):
            return NotImplemented
        return self.n == other.n and self.constraints == other.constraints

    __hash__ = None

    def with_constraints(self, extra: Iterable[LinearConstraint]) -> "FeasibleRegion":
        return FeasibleRegion(self.n, self.constraints + tuple(extra))

    @cached_property
    def matrix(self) -> np.ndarray:
        """Dense (m, 2n) coefficient matrix in row-major column order."""
        matrix = np.zeros((len(self.constraints), 2 * self.n))
        for row, constraint in enumerate(self.constraints):
            for i, j, c in constraint.terms:
                matrix[row, i * self.n + j] = c
        return matrix

    @cached_property
    def rhs(self) -> np.ndarray:
        return np.array([c.rhs for c in self.constraints], dtype=float)

    @cached_property
    def relations(self) -> Tuple[Relation, ...]:
        return tuple(c.relation for c in self.constraints)

    @cached_property
    def tolerances(self) -> np.ndarray:
        return np.array(
            [0.0 if c.integral else FEASIBILITY_TOLERANCE for c in self.constraints], dtype=float
        )

    def is_row_symmetric(self) -> bool:
        """True when swapping the two rows maps Omega onto itself."""
        own = {self._signature(c) for c in self.constraints}
        swapped = {
            self._signature(LinearConstraint(tuple((1 - i, j, v) for i, j, v in c.terms), c.relation, c.rhs))
            for c in self.constraints
        }
        return own == swapped

    @staticmethod
    def _signature(constraint: LinearConstraint) -> Tuple:
        return (constraint.terms, constraint.relation, constraint.rhs)

    def feasible_mask(self, selections: np.ndarray) -> np.ndarray:
        """
        Row-wise feasibility of a (K, 2n) batch of flattened selections.
        """
        selections = np.asarray(selections, dtype=float)
        if not self.constraints:
            return np.ones(selections.shape[0], dtype=bool)
        lhs = selections @ self.matrix.T
        mask = np.ones(selections.shape[0], dtype=bool)
        for row, relation in enumerate(self.relations):
            rhs, tol = self.rhs[row], self.tolerances[row]
            column = lhs[:, row]
            if relation is Relation.LE:
                mask &= column <= rhs + tol
            elif relation is Relation.GE:
                mask &= column >= rhs - tol
            else:
                mask &= np.abs(column - rhs) <= tol
        return mask


def is_feasible(region: FeasibleRegion, x: SelectionPair) -> bool:
    """
    Check a selection against every constraint of the region.

    Integral constraints are evaluated in exact integer arithmetic; others
    with an absolute tolerance of 1e-9.

    Raises:
        DimensionMismatchError: If x.n differs from region.n
    """
    if x.n != region.n:
        raise DimensionMismatchError(f"selection has n={x.n}, region has n={region.n}")
    for constraint in region.constraints:
        if constraint.integral:
            lhs = sum(int(c) * int(x.x[i, j]) for i, j, c in constraint.terms)
        else:
            lhs = sum(c * float(x.x[i, j]) for i, j, c in constraint.terms)
        if not constraint.holds(lhs):
            return False
    return True


def disjointness_constraints(n: int) -> Tuple[LinearConstraint, ...]:
    """x[0, j] + x[1, j] <= 1 for every j."""
    return tuple(
        LinearConstraint(((0, j, 1.0), (1, j, 1.0)), Relation.LE, 1.0, name=f"disjoint_{j}")
        for j in range(n)
    )


def partition_constraints(n: int) -> Tuple[LinearConstraint, ...]:
    """x[0, j] + x[1, j] = 1 for every j."""
    return tuple(
        LinearConstraint(((0, j, 1.0), (1, j, 1.0)), Relation.EQ, 1.0, name=f"assign_{j}")
        for j in range(n)
    )


def row_constraint(
    row: int,
    coefficients: Mapping[int, float],
    relation: Relation,
    rhs: float,
    name: Optional[str] = None,
) -> LinearConstraint:
    """Constraint on a single row: sum_j a_j x[row, j] (relation) rhs."""
    return LinearConstraint(
        tuple((row, j, c) for j, c in coefficients.items()),
        relation,
        rhs,
        name=name or f"row{row}",
    )
