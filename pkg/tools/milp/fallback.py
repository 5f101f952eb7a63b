"""
Built-in backend: enumerate the selection binaries, complete the rest in
closed form.

Feasible selections are enumerated in lexicographic order (0 before 1,
row-major variable order) with interval pruning on every non-lazy
constraint that only involves selection variables. The enumeration of a
given selection region is cached, so re-solving a model that only gained
lazy cuts costs one mask update and one arg-max.
"""
import math
import threading
import time
import weakref
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from shared.config.constants import DEFAULT_ENUMERATION_LIMIT, MILP_FEASIBILITY_TOLERANCE
from shared.config.settings import get_settings
from shared.errors import EnumerationLimitError, ModelError, PreconditionError
from shared.logging.logger import setup_logger, log_with_context
from tools.instances.region import Relation
from tools.milp.model import (
    Completion,
    Constraint,
    MilpModel,
    MilpOutcome,
    ModelSense,
    OutcomeStatus,
    VarKind,
    trivial_bound,
)

logger = setup_logger(__name__)

CACHE_ENTRIES = 16


class SelectionEnumerator:
    """Lexicographic enumeration of binary vectors under linear constraints."""

    def __init__(
        self,
        size: int,
        matrix: np.ndarray,
        relations: Sequence[Relation],
        rhs: np.ndarray,
        allowed: Sequence[Tuple[int, ...]],
        chunk_size: int = 1024,
    ):
        self.size = size
        self.matrix = np.asarray(matrix, dtype=float).reshape(-1, size)
        self.rhs = np.asarray(rhs, dtype=float)
        self.allowed = list(allowed)
        self.chunk_size = max(1, chunk_size)
        self.timed_out = False

        relations = list(relations)
        self._upper_rows = np.array([r in (Relation.LE, Relation.EQ) for r in relations], dtype=bool)
        self._lower_rows = np.array([r in (Relation.GE, Relation.EQ) for r in relations], dtype=bool)

        # Range of the contribution of columns k.. of every row
        negative = np.minimum(self.matrix, 0.0)
        positive = np.maximum(self.matrix, 0.0)
        self._rest_min = np.zeros((size + 1, self.matrix.shape[0]))
        self._rest_max = np.zeros((size + 1, self.matrix.shape[0]))
        for k in range(size - 1, -1, -1):
            self._rest_min[k] = self._rest_min[k + 1] + negative[:, k]
            self._rest_max[k] = self._rest_max[k + 1] + positive[:, k]

    def _viable(self, lhs: np.ndarray, level: int) -> np.ndarray:
        tol = MILP_FEASIBILITY_TOLERANCE
        low = lhs + self._rest_min[level]
        high = lhs + self._rest_max[level]
        ok = np.ones(lhs.shape[0], dtype=bool)
        if self._upper_rows.any():
            ok &= np.all(low[:, self._upper_rows] <= self.rhs[self._upper_rows] + tol, axis=1)
        if self._lower_rows.any():
            ok &= np.all(high[:, self._lower_rows] >= self.rhs[self._lower_rows] - tol, axis=1)
        return ok

    def batches(self, deadline: float) -> Iterator[np.ndarray]:
        """
        Yield (K, size) int8 batches of feasible vectors in lexicographic order.

        Sets ``timed_out`` and stops early when the deadline passes.
        """
        m = self.matrix.shape[0]
        stack: List[Tuple[np.ndarray, np.ndarray]] = [
            (np.zeros((1, 0), dtype=np.int8), np.zeros((1, m)))
        ]
        if not self._viable(stack[0][1], 0).all():
            return
        while stack:
            if time.monotonic() > deadline:
                self.timed_out = True
                return
            block, lhs = stack.pop()
            level = block.shape[1]
            if level == self.size:
                yield block
                continue

            values = self.allowed[level]
            rows = block.shape[0]
            expanded = np.empty((rows * len(values), level + 1), dtype=np.int8)
            expanded_lhs = np.empty((rows * len(values), m))
            for offset, value in enumerate(values):
                expanded[offset::len(values), :level] = block
                expanded[offset::len(values), level] = value
                expanded_lhs[offset::len(values)] = lhs + value * self.matrix[:, level]

            keep = self._viable(expanded_lhs, level + 1)
            expanded, expanded_lhs = expanded[keep], expanded_lhs[keep]
            if expanded.shape[0] == 0:
                continue
            pieces = range(0, expanded.shape[0], self.chunk_size)
            for start in reversed(pieces):
                stop = start + self.chunk_size
                stack.append((expanded[start:stop], expanded_lhs[start:stop]))


@dataclass
class _Split:
    selection: Tuple[str, ...]
    processed: int = 0
    structural: List[Constraint] = field(default_factory=list)
    lazy: List[Constraint] = field(default_factory=list)


@dataclass
class _Enumeration:
    leaves: np.ndarray
    lazy_state: Tuple[Tuple[Constraint, ...], np.ndarray]
    scores: Dict[Hashable, np.ndarray]


class LinearCompletion:
    """Completion of a pure-binary model: every variable is a selection variable."""

    cache_key = None

    def __init__(self, model: MilpModel):
        self.names = tuple(model.selection or model.variable_names)
        index = {name: k for k, name in enumerate(self.names)}
        self.weights = np.zeros(len(self.names))
        for name, coefficient in model.objective.terms:
            self.weights[index[name]] = coefficient
        self.constant = model.objective.constant

    def objective_values(self, selections: np.ndarray) -> np.ndarray:
        return self.constant + selections @ self.weights

    def complete(self, selection: np.ndarray) -> Dict[str, float]:
        return {name: float(value) for name, value in zip(self.names, selection)}


class FallbackBackend:
    """Dependency-free backend for models whose auxiliaries follow from a selection."""

    name = "fallback"

    def __init__(self, chunk_size: Optional[int] = None, enumeration_limit: int = DEFAULT_ENUMERATION_LIMIT):
        self.chunk_size = chunk_size or get_settings().fallback_chunk_size
        self.enumeration_limit = enumeration_limit
        self._cache: "OrderedDict[Hashable, _Enumeration]" = OrderedDict()
        self._lock = threading.Lock()
        self._splits: "weakref.WeakKeyDictionary[MilpModel, _Split]" = weakref.WeakKeyDictionary()

    def solve(self, model: MilpModel, time_limit: float) -> MilpOutcome:
        """
        Solve a model through its declared selection completion.

        Pure-binary models without a completion are solved with a linear one.

        Raises:
            ModelError: If the model has continuous variables but no completion
        """
        model.validate()
        if model.completion is not None and model.selection is not None:
            return self.solve_selection(model, model.selection, model.completion, time_limit)
        if model.count(VarKind.CONTINUOUS):
            raise ModelError("fallback backend needs a selection completion for models with continuous variables")
        return self.solve_selection(model, tuple(model.variable_names), LinearCompletion(model), time_limit)

    def clear_cache(self) -> None:
        with self._lock:
            self._cache.clear()
            self._splits.clear()

    # Enumeration

    def _split_constraints(self, model: MilpModel, selection: Sequence[str]):
        """
        Structural and lazy constraints over the selection binaries.

        Constraints are only ever appended to a model, so the split is
        extended from where the previous solve of the same model stopped.

        Raises:
            ModelError: If a lazy constraint involves a non-selection variable
        """
        selection = tuple(selection)
        with self._lock:
            split = self._splits.get(model)
        if split is None or split.selection != selection or split.processed > len(model.constraints):
            split = _Split(selection=selection)
        chosen = set(selection)
        for constraint in model.constraints[split.processed:]:
            if all(name in chosen for name, _ in constraint.terms):
                (split.lazy if constraint.lazy else split.structural).append(constraint)
            elif constraint.lazy:
                raise ModelError(f"lazy constraint {constraint.name or '<unnamed>'} involves non-selection variables")
        split.processed = len(model.constraints)
        with self._lock:
            self._splits[model] = split
        return split.structural, split.lazy

    @staticmethod
    def _dense(constraints: Sequence[Constraint], selection: Sequence[str]) -> Tuple[np.ndarray, np.ndarray]:
        column = {name: k for k, name in enumerate(selection)}
        matrix = np.zeros((len(constraints), len(selection)))
        for row, constraint in enumerate(constraints):
            for name, coefficient in constraint.terms:
                matrix[row, column[name]] = coefficient
        return matrix, np.array([c.rhs for c in constraints], dtype=float)

    @staticmethod
    def _allowed_values(model: MilpModel, selection: Sequence[str]) -> List[Tuple[int, ...]]:
        allowed = []
        for name in selection:
            variable = model.variable(name)
            allowed.append(tuple(v for v in (0, 1) if variable.lower - 1e-9 <= v <= variable.upper + 1e-9))
        return allowed

    def _enumerate(self, model, selection, structural, deadline) -> Tuple[Optional[_Enumeration], np.ndarray, bool, Hashable]:
        allowed = self._allowed_values(model, selection)
        key = (tuple(selection), tuple(structural), tuple(allowed))
        with self._lock:
            entry = self._cache.get(key)
            if entry is not None:
                self._cache.move_to_end(key)
                return entry, entry.leaves, False, key

        matrix, rhs = self._dense(structural, selection)
        enumerator = SelectionEnumerator(
            len(selection), matrix, [c.relation for c in structural], rhs, allowed, self.chunk_size
        )
        batches, total = [], 0
        for batch in enumerator.batches(deadline):
            batches.append(batch)
            total += batch.shape[0]
            if total > self.enumeration_limit:
                raise EnumerationLimitError(f"more than {self.enumeration_limit} feasible selections")
        leaves = np.concatenate(batches) if batches else np.zeros((0, len(selection)), dtype=np.int8)
        if enumerator.timed_out:
            return None, leaves, True, key

        entry = _Enumeration(leaves=leaves, lazy_state=((), np.ones(leaves.shape[0], dtype=bool)), scores={})
        with self._lock:
            self._cache[key] = entry
            while len(self._cache) > CACHE_ENTRIES:
                self._cache.popitem(last=False)
        return entry, leaves, False, key

    @staticmethod
    def _apply_lazy(leaves: np.ndarray, lazy: Sequence[Constraint], selection: Sequence[str]) -> np.ndarray:
        mask = np.ones(leaves.shape[0], dtype=bool)
        if not lazy or leaves.shape[0] == 0:
            return mask
        matrix, rhs = FallbackBackend._dense(lazy, selection)
        lhs = leaves.astype(float) @ matrix.T
        tol = MILP_FEASIBILITY_TOLERANCE
        for row, constraint in enumerate(lazy):
            if constraint.relation is Relation.LE:
                mask &= lhs[:, row] <= rhs[row] + tol
            elif constraint.relation is Relation.GE:
                mask &= lhs[:, row] >= rhs[row] - tol
            else:
                mask &= np.abs(lhs[:, row] - rhs[row]) <= tol
        return mask

    def _lazy_mask(self, entry: Optional[_Enumeration], leaves, lazy, selection) -> np.ndarray:
        lazy = tuple(lazy)
        if entry is None:
            return self._apply_lazy(leaves, lazy, selection)
        applied, mask = entry.lazy_state
        if lazy[:len(applied)] == applied:
            mask = mask & self._apply_lazy(leaves, lazy[len(applied):], selection)
        else:
            mask = self._apply_lazy(leaves, lazy, selection)
        entry.lazy_state = (lazy, mask)
        return mask

    def _scores(self, entry, leaves, completion: Completion, deadline: float) -> Tuple[np.ndarray, bool]:
        key = getattr(completion, "cache_key", None)
        if entry is not None and key is not None and key in entry.scores:
            return entry.scores[key], False

        scores = np.full(leaves.shape[0], np.nan)
        for start in range(0, leaves.shape[0], self.chunk_size):
            if time.monotonic() > deadline:
                return scores, True
            stop = start + self.chunk_size
            scores[start:stop] = completion.objective_values(leaves[start:stop].astype(float))
        if entry is not None and key is not None:
            entry.scores[key] = scores
        return scores, False

    # Solve

    def solve_selection(
        self,
        model: MilpModel,
        selection_vars: Sequence[str],
        derive: Completion,
        time_limit: float,
    ) -> MilpOutcome:
        """
        Enumerate feasible selections, complete each and return the best.

        Args:
            model: Model to solve
            selection_vars: Names of the selection binaries (enumeration order)
            derive: Closed-form completion of the remaining variables
            time_limit: Seconds

        Returns:
            MilpOutcome; exact (optimal or infeasible) when enumeration finishes
        """
        if time_limit <= 0:
            raise PreconditionError(f"time_limit must be positive, got {time_limit}")
        model.validate()
        for name in selection_vars:
            if model.variable(name).kind is not VarKind.BINARY:
                raise ModelError(f"selection variable {name} must be binary")

        started = time.monotonic()
        deadline = started + time_limit
        structural, lazy = self._split_constraints(model, selection_vars)

        entry, leaves, enum_timed_out, _ = self._enumerate(model, selection_vars, structural, deadline)
        mask = self._lazy_mask(entry, leaves, lazy, selection_vars)
        scores, score_timed_out = self._scores(entry, leaves, derive, deadline)
        timed_out = enum_timed_out or score_timed_out

        maximize = model.objective.sense is ModelSense.MAXIMIZE
        usable = mask & np.isfinite(scores)
        ranked = np.where(usable, scores, -np.inf if maximize else np.inf)

        nodes = int(leaves.shape[0])
        if not usable.any():
            status = OutcomeStatus.TIME_LIMIT_NO_INCUMBENT if timed_out else OutcomeStatus.INFEASIBLE
            return MilpOutcome(
                status=status,
                dual_bound=trivial_bound(model) if timed_out else None,
                wall_time=time.monotonic() - started,
                nodes=nodes,
                backend=self.name,
            )

        best = int(np.argmax(ranked) if maximize else np.argmin(ranked))
        assignment = derive.complete(leaves[best].astype(float))
        problems = model.violations(assignment, include_lazy=False)
        if problems:
            raise ModelError(f"completion of selection {best} violates {', '.join(problems[:5])}")
        value = model.objective.value(assignment)
        if abs(value - scores[best]) > 1e-6 * max(1.0, abs(value)):
            raise ModelError(f"completion objective {value} differs from score {scores[best]}")

        wall_time = time.monotonic() - started
        if timed_out:
            bound = trivial_bound(model)
            log_with_context(logger, "warning", "Fallback enumeration hit the time limit",
                             model=model.name, nodes=nodes, time_limit=time_limit)
            return MilpOutcome(
                status=OutcomeStatus.FEASIBLE_WITH_BOUND,
                incumbent=assignment,
                objective_value=value,
                dual_bound=bound if math.isfinite(bound) else None,
                wall_time=wall_time,
                nodes=nodes,
                backend=self.name,
            )

        log_with_context(logger, "debug", "Fallback solve finished", model=model.name,
                         nodes=nodes, alive=int(usable.sum()), objective=value, wall_time=wall_time)
        return MilpOutcome(
            status=OutcomeStatus.OPTIMAL,
            incumbent=assignment,
            objective_value=value,
            dual_bound=value,
            wall_time=wall_time,
            nodes=nodes,
            backend=self.name,
        )


def fallback_solve_selection(
    model: MilpModel,
    selection_vars: Sequence[str],
    derive: Completion,
    time_limit: float,
) -> MilpOutcome:
    """Solve with a fresh FallbackBackend (no shared enumeration cache)."""
    return FallbackBackend().solve_selection(model, selection_vars, derive, time_limit)
