"""
Relaxed master problems and the bounding solves that size their grids.

Every model here is built on Psi: the selection binaries x, the McCormick
products v and r, the ordered row means u1 >= u2 and s = theta(x)^2. When
Omega treats both rows alike, u1 is the first row's mean and the rows are
ordered by a constraint; otherwise a binary ``order`` picks the larger mean.
All auxiliary variables are functions of x, so each model carries a
closed-form completion the fallback backend enumerates over.
"""
import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from shared.config.constants import DEFAULT_BOUND_TIME_LIMIT, INV_SQRT_2PI, MONOTONE_TOLERANCE
from shared.errors import InfeasibleRegionError, ModelError, PreconditionError
from shared.logging.logger import setup_logger, log_with_context
from solvers.cutting_plane.bounds import BoundKind, baseline_coefficients, evaluate_intervals, pair_tables
from solvers.cutting_plane.grid import DiscretizationGrid
from tools.gaussian.moments import batch_pair_moments
from tools.instances.problem import ProblemInstance
from tools.instances.region import Relation
from tools.milp.client import MilpBackend, get_milp_backend
from tools.milp.model import MilpModel, ModelSense, OutcomeStatus

logger = setup_logger(__name__)

_completion_keys = itertools.count()


def x_name(i: int, j: int) -> str:
    return f"x_{i}_{j}"


def selection_names(n: int) -> List[str]:
    """Selection binaries in row-major order."""
    return [x_name(i, j) for i in range(2) for j in range(n)]


def _v_name(i: int, j: int, k: int) -> str:
    return f"v_{i}_{j}_{k}"


def _r_name(j: int, k: int) -> str:
    return f"r_{j}_{k}"


# Closed-form completions

class PsiCompletion:
    """Completion of Psi; scores one of s, u1 - u2 or u1."""

    TARGETS = ("theta2", "delta", "u1")

    def __init__(self, instance: ProblemInstance, target: str = "theta2"):
        if target not in self.TARGETS:
            raise PreconditionError(f"unknown bounding target {target!r}")
        self.instance = instance
        self.target = target
        self.n = instance.n
        self.ordered_rows = instance.region.is_row_symmetric()
        self.cache_key = ("psi", target, next(_completion_keys))

    def _moments(self, selections: np.ndarray):
        batch = batch_pair_moments(self.instance.gaussian, selections)
        s_raw = batch.v1 + batch.v2 - 2.0 * batch.c12
        if self.ordered_rows:
            return batch.e1, batch.e2, s_raw, batch.e1 >= batch.e2
        return batch.e_high, batch.e_low, s_raw, np.ones(batch.e1.shape, dtype=bool)

    def objective_values(self, selections: np.ndarray) -> np.ndarray:
        u1, u2, s_raw, feasible = self._moments(selections)
        if self.target == "theta2":
            values = s_raw
        elif self.target == "delta":
            values = u1 - u2
        else:
            values = u1
        return np.where(feasible, values, np.nan)

    def psi_assignment(self, selection: np.ndarray) -> Dict[str, float]:
        n = self.n
        rows = np.rint(np.asarray(selection, dtype=float)).reshape(2, n)
        u1, u2, s_raw, feasible = self._moments(rows.reshape(1, -1))
        if not feasible[0]:
            raise ModelError("selection violates u1 >= u2")

        assignment: Dict[str, float] = {}
        for i in range(2):
            for j in range(n):
                assignment[x_name(i, j)] = float(rows[i, j])
                for k in range(n):
                    assignment[_v_name(i, j, k)] = float(rows[i, j] * rows[i, k])
        for j in range(n):
            for k in range(n):
                assignment[_r_name(j, k)] = float(rows[0, j] * rows[1, k])
        assignment["u1"] = float(u1[0])
        assignment["u2"] = float(u2[0])
        assignment["s"] = float(s_raw[0])
        if not self.ordered_rows:
            means = rows @ self.instance.gaussian.mu
            assignment["m_0"] = float(means[0])
            assignment["m_1"] = float(means[1])
            assignment["order"] = 1.0 if means[0] >= means[1] else 0.0
        return assignment

    def complete(self, selection: np.ndarray) -> Dict[str, float]:
        return self.psi_assignment(selection)


class RmpCompletion(PsiCompletion):
    """Completion of a baseline or enhanced RMP through its grid evaluation."""

    def __init__(
        self,
        instance: ProblemInstance,
        grid: DiscretizationGrid,
        kind: BoundKind,
        theta_floors: Optional[Tuple[float, ...]] = None,
    ):
        super().__init__(instance, "theta2")
        self.grid = grid
        self.kind = BoundKind(kind)
        self.sense = instance.sense
        self.theta_floors = theta_floors
        self.cache_key = ("rmp", self.kind.value, next(_completion_keys))

    def with_floors(self, theta_floors: Tuple[float, ...]) -> "RmpCompletion":
        return RmpCompletion(self.instance, self.grid, self.kind, tuple(theta_floors))

    def _evaluate(self, selections: np.ndarray):
        u1, u2, s_raw, feasible = self._moments(selections)
        values, q_index, h_index = evaluate_intervals(
            u1, u2, np.maximum(s_raw, 0.0), u1 - u2, self.grid, self.sense, self.kind, self.theta_floors
        )
        return np.where(feasible, values, np.nan), q_index, h_index

    def objective_values(self, selections: np.ndarray) -> np.ndarray:
        values, _, _ = self._evaluate(selections)
        return values

    def complete(self, selection: np.ndarray) -> Dict[str, float]:
        assignment = self.psi_assignment(selection)
        values, q_index, h_index = self._evaluate(np.asarray(selection, dtype=float).reshape(1, -1))
        if not np.isfinite(values[0]):
            raise ModelError("selection has no admissible grid interval")
        q = int(q_index[0])

        grid = self.grid
        for index in range(grid.d):
            assignment[f"w_{index}"] = 1.0 if index == q else 0.0
        assignment["s_prime"] = float(grid.theta_upper[q])

        if self.kind is BoundKind.ENHANCED:
            h = int(h_index[0])
            for index in range(grid.l):
                assignment[f"y_{index}"] = 1.0 if index == h else 0.0
            weights, spreads = pair_tables(grid, self.sense)
            weight = float(weights[q, h])
            assignment["U"] = assignment["u1"] * weight + assignment["u2"] * (1.0 - weight)
            assignment["U_prime"] = float(spreads[q, h])
        return assignment


# Psi and the bounding solves

def build_psi_model(instance: ProblemInstance, name: str = "psi") -> MilpModel:
    """
    Psi: x in Omega, McCormick products, u1 >= u2 and s = theta(x)^2.

    The model has no objective; callers set one.
    """
    n = instance.n
    mu = instance.gaussian.mu
    sigma = instance.gaussian.sigma
    model = MilpModel(name)

    for i in range(2):
        for j in range(n):
            model.add_binary(x_name(i, j))
    for i in range(2):
        for j in range(n):
            for k in range(n):
                model.add_binary(_v_name(i, j, k))
    for j in range(n):
        for k in range(n):
            model.add_binary(_r_name(j, k))
    model.add_continuous("u1")
    model.add_continuous("u2")
    model.add_continuous("s")

    # Row means: symmetry breaking only when swapping the rows keeps x in Omega
    if instance.region.is_row_symmetric():
        for i, u in ((0, "u1"), (1, "u2")):
            terms = [(u, 1.0)] + [(x_name(i, j), -float(mu[j])) for j in range(n)]
            model.add_constraint(terms, Relation.EQ, 0.0, name=f"mean_{i}")
        model.add_constraint({"u1": 1.0, "u2": -1.0}, Relation.GE, 0.0, name="symmetry")
    else:
        _add_ordered_means(model, instance)

    # s = theta(x)^2
    terms = [("s", 1.0)]
    for i in range(2):
        for j in range(n):
            terms.append((x_name(i, j), -float(sigma[j, j])))
            for k in range(j + 1, n):
                terms.append((_v_name(i, j, k), -2.0 * float(sigma[j, k])))
    for j in range(n):
        for k in range(n):
            terms.append((_r_name(j, k), 2.0 * float(sigma[j, k])))
    model.add_constraint(terms, Relation.EQ, 0.0, name="theta2")

    # McCormick linearization
    for i in range(2):
        for j in range(n):
            for k in range(n):
                v, a, b = _v_name(i, j, k), x_name(i, j), x_name(i, k)
                model.add_constraint({v: 1.0, a: -1.0}, Relation.LE, 0.0, name=f"{v}_le_{a}")
                model.add_constraint({v: 1.0, b: -1.0}, Relation.LE, 0.0, name=f"{v}_le_{b}")
                model.add_constraint([(v, 1.0), (a, -1.0), (b, -1.0)], Relation.GE, -1.0, name=f"{v}_ge")
    for j in range(n):
        for k in range(n):
            r, a, b = _r_name(j, k), x_name(0, j), x_name(1, k)
            model.add_constraint({r: 1.0, a: -1.0}, Relation.LE, 0.0, name=f"{r}_le_{a}")
            model.add_constraint({r: 1.0, b: -1.0}, Relation.LE, 0.0, name=f"{r}_le_{b}")
            model.add_constraint({r: 1.0, a: -1.0, b: -1.0}, Relation.GE, -1.0, name=f"{r}_ge")

    for index, constraint in enumerate(instance.region.constraints):
        terms = [(x_name(i, j), c) for i, j, c in constraint.terms]
        model.add_constraint(terms, constraint.relation, constraint.rhs, name=constraint.name or f"omega_{index}")
    return model


def _add_ordered_means(model: MilpModel, instance: ProblemInstance) -> None:
    """u1 = max(m_0, m_1) and u2 = min(m_0, m_1) over the row means m_i."""
    n = instance.n
    mu = instance.gaussian.mu
    big_m = max(float(np.abs(mu).sum()), 1.0)
    for i in range(2):
        model.add_continuous(f"m_{i}")
        terms = [(f"m_{i}", 1.0)] + [(x_name(i, j), -float(mu[j])) for j in range(n)]
        model.add_constraint(terms, Relation.EQ, 0.0, name=f"mean_{i}")
    model.add_binary("order")
    model.add_constraint({"u1": 1.0, "u2": 1.0, "m_0": -1.0, "m_1": -1.0}, Relation.EQ, 0.0, name="mean_sum")
    model.add_constraint({"u1": 1.0, "m_0": -1.0}, Relation.GE, 0.0, name="u1_ge_m_0")
    model.add_constraint({"u1": 1.0, "m_1": -1.0}, Relation.GE, 0.0, name="u1_ge_m_1")
    # order = 1 pins u1 to m_0, order = 0 pins it to m_1
    model.add_constraint({"u1": 1.0, "m_0": -1.0, "order": big_m}, Relation.LE, big_m, name="u1_le_m_0")
    model.add_constraint({"u1": 1.0, "m_1": -1.0, "order": -big_m}, Relation.LE, 0.0, name="u1_le_m_1")


def _data_bound(instance: ProblemInstance, target: str) -> float:
    if target == "theta2":
        return float(np.abs(instance.gaussian.sigma).sum())
    return float(np.abs(instance.gaussian.mu).sum())


def _bounding_solve(
    instance: ProblemInstance,
    target: str,
    time_limit: float,
    backend: Optional[MilpBackend],
) -> float:
    backend = backend or get_milp_backend()
    model = build_psi_model(instance, name=f"psi_{target}")
    objective = {"theta2": {"s": 1.0}, "delta": {"u1": 1.0, "u2": -1.0}, "u1": {"u1": 1.0}}[target]
    model.set_objective(objective, ModelSense.MAXIMIZE)
    model.set_selection(selection_names(instance.n), PsiCompletion(instance, target))

    outcome = backend.solve(model, time_limit)
    if outcome.status is OutcomeStatus.INFEASIBLE:
        raise InfeasibleRegionError(f"feasible region of {instance.label or 'instance'} is empty")

    data_bound = _data_bound(instance, target)
    bound = data_bound
    if outcome.dual_bound is not None and math.isfinite(outcome.dual_bound):
        bound = min(outcome.dual_bound, data_bound)
    else:
        log_with_context(logger, "warning", "Bounding solve returned no dual bound; using data bound",
                         target=target, status=outcome.status.value, bound=data_bound)
    if outcome.has_incumbent:
        bound = max(bound, outcome.objective_value)

    log_with_context(logger, "debug", "Bounding solve finished", target=target,
                     status=outcome.status.value, bound=bound, wall_time=outcome.wall_time)
    return float(bound)


def compute_theta2_upper(
    instance: ProblemInstance,
    time_limit: float = DEFAULT_BOUND_TIME_LIMIT,
    backend: Optional[MilpBackend] = None,
) -> float:
    """
    Upper bound on theta(x)^2 over Omega: the dual bound of max{s | Psi}.

    Raises:
        InfeasibleRegionError: If Omega admits no selection
    """
    return max(0.0, _bounding_solve(instance, "theta2", time_limit, backend))


def compute_delta_upper(
    instance: ProblemInstance,
    time_limit: float = DEFAULT_BOUND_TIME_LIMIT,
    backend: Optional[MilpBackend] = None,
) -> float:
    """
    Upper bound on delta(x) over Omega: the dual bound of max{u1 - u2 | Psi}.

    Raises:
        InfeasibleRegionError: If Omega admits no selection
    """
    return max(0.0, _bounding_solve(instance, "delta", time_limit, backend))


def compute_u1_upper(
    instance: ProblemInstance,
    time_limit: float = DEFAULT_BOUND_TIME_LIMIT,
    backend: Optional[MilpBackend] = None,
) -> float:
    """
    Upper bound on E[Z1(x)] over Omega: the dual bound of max{u1 | Psi}.

    Raises:
        InfeasibleRegionError: If Omega admits no selection
    """
    return _bounding_solve(instance, "u1", time_limit, backend)


def compute_big_m(
    instance: ProblemInstance,
    grid: DiscretizationGrid,
    u1_upper: Optional[float] = None,
    time_limit: float = DEFAULT_BOUND_TIME_LIMIT,
    backend: Optional[MilpBackend] = None,
) -> Tuple[float, float]:
    """
    Deactivation constants of the enhanced RMP.

    big_m_u is the sum of all means for makespan instances and the bound on
    max u1 otherwise, raised to at least delta_max; big_m_uprime is
    theta2_max / sqrt(2 pi).

    Returns:
        (big_m_u, big_m_uprime)
    """
    if instance.family == "ms":
        big_m_u = float(np.sum(instance.gaussian.mu))
    else:
        big_m_u = u1_upper if u1_upper is not None else compute_u1_upper(instance, time_limit, backend)
    big_m_u = max(big_m_u, grid.delta_max)
    return float(big_m_u), grid.theta2_max * INV_SQRT_2PI


@dataclass(frozen=True)
class BoundContext:
    """Constants shared by the RMPs of one solve."""

    grid: DiscretizationGrid
    big_m_u: float
    big_m_uprime: float
    u_bar: float
    z_lb: Optional[float] = None
    theta_floors: Optional[Tuple[float, ...]] = field(default=None)

    def __post_init__(self):
        if self.theta_floors is not None:
            floors = tuple(float(f) for f in self.theta_floors)
            if len(floors) != self.grid.l:
                raise PreconditionError(f"expected {self.grid.l} theta floors, got {len(floors)}")
            for low, high in zip(floors, floors[1:]):
                if high < low - MONOTONE_TOLERANCE:
                    raise PreconditionError("theta floors must be nondecreasing")
            object.__setattr__(self, "theta_floors", floors)


# RMP builders

def _add_theta_intervals(model: MilpModel, grid: DiscretizationGrid) -> None:
    w_names = [model.add_binary(f"w_{q}") for q in range(grid.d)]
    model.add_continuous("s_prime")
    model.add_constraint({w: 1.0 for w in w_names}, Relation.EQ, 1.0, name="one_theta_interval")
    terms = [("s_prime", 1.0)] + [(w, -float(grid.theta_upper[q])) for q, w in enumerate(w_names)]
    model.add_constraint(terms, Relation.EQ, 0.0, name="theta_upper")

    top = grid.theta2_max
    for q, w in enumerate(w_names):
        low, high = float(grid.theta2_breaks[q]), float(grid.theta2_breaks[q + 1])
        model.add_constraint({w: low, "s": -1.0}, Relation.LE, 0.0, name=f"theta2_low_{q}")
        model.add_constraint({"s": 1.0, w: top}, Relation.LE, high + top, name=f"theta2_high_{q}")


def _add_delta_intervals(model: MilpModel, grid: DiscretizationGrid) -> None:
    y_names = [model.add_binary(f"y_{h}") for h in range(grid.l)]
    model.add_constraint({y: 1.0 for y in y_names}, Relation.EQ, 1.0, name="one_delta_interval")

    top = grid.delta_max
    for h, y in enumerate(y_names):
        low, high = float(grid.delta_breaks[h]), float(grid.delta_breaks[h + 1])
        model.add_constraint({y: low, "u1": -1.0, "u2": 1.0}, Relation.LE, 0.0, name=f"delta_low_{h}")
        model.add_constraint({"u1": 1.0, "u2": -1.0, y: top}, Relation.LE, high + top, name=f"delta_high_{h}")


def build_baseline_rmp(
    instance: ProblemInstance,
    grid: DiscretizationGrid,
    ctx: Optional[BoundContext] = None,
) -> MilpModel:
    """
    Baseline RMP: maximize u1 + s'/sqrt(2 pi) over Psi with a theta^2 interval choice.

    Minimization instances get the mirror
    (u1 + u2)/2 + sum_q theta_q phi(delta_max/theta_q) w_q, minimized.
    """
    model = build_psi_model(instance, name="baseline_rmp")
    _add_theta_intervals(model, grid)

    if instance.sense.is_max:
        model.set_objective({"u1": 1.0, "s_prime": INV_SQRT_2PI}, ModelSense.MAXIMIZE)
    else:
        constant = baseline_coefficients(grid, instance.sense)
        w_terms = [(f"w_{q}", float(constant[q])) for q in range(grid.d)]
        model.set_objective([("u1", 0.5), ("u2", 0.5)] + w_terms, ModelSense.MINIMIZE)

    model.set_selection(selection_names(instance.n), RmpCompletion(instance, grid, BoundKind.BASELINE))
    return model


def build_enhanced_rmp(instance: ProblemInstance, grid: DiscretizationGrid, ctx: BoundContext) -> MilpModel:
    """
    Enhanced RMP over joint theta^2 and delta intervals.

    Maximization bounds U and U' from above on the active (q, h) pair;
    minimization bounds them from below with the interval endpoints swapped.
    Constraints of inactive pairs are relaxed by big_m_u and big_m_uprime.
    """
    model = build_psi_model(instance, name="enhanced_rmp")
    _add_theta_intervals(model, grid)
    _add_delta_intervals(model, grid)
    model.add_continuous("U")
    model.add_continuous("U_prime")

    weights, spreads = pair_tables(grid, instance.sense)
    big_m, big_m_prime = ctx.big_m_u, ctx.big_m_uprime
    maximize = instance.sense.is_max
    for q in range(grid.d):
        w = f"w_{q}"
        for h in range(grid.l):
            y = f"y_{h}"
            weight, spread = float(weights[q, h]), float(spreads[q, h])
            if maximize:
                model.add_constraint(
                    [("U", 1.0), ("u1", -weight), ("u2", weight - 1.0), (w, big_m), (y, big_m)],
                    Relation.LE, 2.0 * big_m, name=f"U_{q}_{h}",
                )
                model.add_constraint(
                    [("U_prime", 1.0), (w, big_m_prime), (y, big_m_prime)],
                    Relation.LE, spread + 2.0 * big_m_prime, name=f"U_prime_{q}_{h}",
                )
            else:
                model.add_constraint(
                    [("U", 1.0), ("u1", -weight), ("u2", weight - 1.0), (w, -big_m), (y, -big_m)],
                    Relation.GE, -2.0 * big_m, name=f"U_{q}_{h}",
                )
                model.add_constraint(
                    [("U_prime", 1.0), (w, -big_m_prime), (y, -big_m_prime)],
                    Relation.GE, spread - 2.0 * big_m_prime, name=f"U_prime_{q}_{h}",
                )

    sense = ModelSense.MAXIMIZE if maximize else ModelSense.MINIMIZE
    model.set_objective({"U": 1.0, "U_prime": 1.0}, sense)
    model.set_selection(selection_names(instance.n), RmpCompletion(instance, grid, BoundKind.ENHANCED))
    return model


