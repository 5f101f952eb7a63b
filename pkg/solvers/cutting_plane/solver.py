"""
Cutting-plane driver.

Each iteration solves the RMP over the unexplored selections, evaluates
the returned selection exactly and excludes it with a no-good cut. For
maximization the RMP optimum bounds the objective from above and the best
exact value from below; minimization swaps the roles.
"""
import math
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from shared.config.presets import load_presets
from shared.errors import InfeasibleRegionError
from shared.logging.logger import setup_logger, log_with_context
from shared.models.run import SolveRecord, SolverConfig, TraceRecord
from solvers.cutting_plane.bounds import BoundKind
from solvers.cutting_plane.cuts import CutPool
from solvers.cutting_plane.grid import build_grid
from solvers.cutting_plane.heuristic import primal_heuristic
from solvers.cutting_plane.rmp import (
    BoundContext,
    build_baseline_rmp,
    build_enhanced_rmp,
    compute_big_m,
    compute_delta_upper,
    compute_theta2_upper,
    compute_u1_upper,
    selection_names,
    x_name,
)
from solvers.cutting_plane.svi import attach_svis, compute_theta_floors
from tools.gaussian.moments import expected_max, pair_moments
from tools.gaussian.types import SelectionPair
from tools.instances.problem import ProblemInstance
from tools.milp.client import MilpBackend, get_milp_backend
from tools.milp.model import MilpModel, OutcomeStatus

logger = setup_logger(__name__)


class SolveStatus(str, Enum):
    """Final state of a cutting-plane run."""
    OPTIMAL = "optimal"
    GAP_LIMIT = "gap_limit"
    TIME_LIMIT = "time_limit"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class IterationRecord:
    """One RMP solve: bounds after the solve and the raw RMP bound."""
    iteration: int
    lb: float
    ub: float
    raw_bound: Optional[float]
    objective: Optional[float]
    selection: Optional[str]
    wall_time: float


@dataclass(frozen=True)
class SolveResult:
    """Outcome of solve(); lb/ub are bounds on the optimal E[max]."""
    status: SolveStatus
    incumbent: Optional[SelectionPair]
    lb: float
    ub: float
    gap: float
    iterations: int
    cuts_added: int
    wall_time: float
    maximize: bool = True
    trace: Tuple[IterationRecord, ...] = ()
    setup: Dict[str, Any] = field(default_factory=dict)

    @property
    def objective(self) -> Optional[float]:
        """Exact objective value of the incumbent."""
        if self.incumbent is None:
            return None
        return self.lb if self.maximize else self.ub

    def to_record(self, instance: ProblemInstance, instance_name: str, config: SolverConfig, version: str) -> SolveRecord:
        """Serializable result record; infinite bounds become null."""

        def finite(value: Optional[float]) -> Optional[float]:
            return value if value is not None and math.isfinite(value) else None

        return SolveRecord(
            version=version,
            instance=instance_name,
            label=instance.label or None,
            family=instance.family,
            sense=instance.sense.value,
            status=self.status.value,
            objective=self.objective,
            incumbent=self.incumbent.x.tolist() if self.incumbent is not None else None,
            lb=finite(self.lb),
            ub=finite(self.ub),
            gap=finite(self.gap),
            iterations=self.iterations,
            cuts_added=self.cuts_added,
            wall_time=self.wall_time,
            setup=self.setup,
            config=config.model_dump(),
            trace=[
                TraceRecord(
                    iteration=entry.iteration,
                    lb=finite(entry.lb),
                    ub=finite(entry.ub),
                    raw_bound=finite(entry.raw_bound),
                    objective=entry.objective,
                    selection=entry.selection,
                    wall_time=entry.wall_time,
                )
                for entry in self.trace
            ],
        )


def resolve_config(instance: ProblemInstance, **overrides: Any) -> SolverConfig:
    """
    Solver configuration from the family preset, with explicit overrides.

    None-valued overrides are ignored.
    """
    presets = load_presets()
    preset = presets.for_family(instance.family)
    values: Dict[str, Any] = {
        "d": preset.d,
        "l": preset.l,
        "svi": preset.svi,
        "tolerance": presets.stopping.tolerance,
        "total_time_limit": presets.stopping.total_time_limit,
        "rmp_time_limit": presets.stopping.rmp_time_limit,
        "bound_time_limit": presets.setup.bound_time_limit,
        "heuristic_time_limit": presets.setup.heuristic_time_limit,
        "heuristic_top_share": presets.setup.heuristic_top_share,
    }
    values.update({key: value for key, value in overrides.items() if value is not None})
    return SolverConfig(**values)


def relative_gap(lb: float, ub: float, maximize: bool) -> float:
    """
    (UB - LB) / UB for maximization, (UB - LB) / LB for minimization.

    Falls back to the absolute gap when the denominator is not positive.
    """
    if not (math.isfinite(lb) and math.isfinite(ub)):
        return math.inf
    spread = max(0.0, ub - lb)
    denominator = ub if maximize else lb
    if denominator <= 0:
        return spread
    return spread / denominator


def build_context(
    instance: ProblemInstance,
    config: SolverConfig,
    backend: MilpBackend,
    deadline: float,
) -> Tuple[BoundContext, Dict[str, Any], Optional[Tuple[SelectionPair, float]]]:
    """
    Bounding solves, grid, big-M, primal heuristic and SVI floors.

    Returns:
        (context, setup summary, heuristic result or None)

    Raises:
        InfeasibleRegionError: If Omega is empty
    """
    def budget(limit: float) -> float:
        return max(1e-3, min(limit, deadline - time.monotonic()))

    theta2_upper = compute_theta2_upper(instance, budget(config.bound_time_limit), backend)
    delta_upper = compute_delta_upper(instance, budget(config.bound_time_limit), backend)
    u_bar = compute_u1_upper(instance, budget(config.bound_time_limit), backend)
    grid = build_grid(theta2_upper, delta_upper, config.d, config.l)
    big_m_u, big_m_uprime = compute_big_m(instance, grid, u1_upper=u_bar)
    ctx = BoundContext(grid=grid, big_m_u=big_m_u, big_m_uprime=big_m_uprime, u_bar=u_bar)

    setup: Dict[str, Any] = {
        "theta2_upper": theta2_upper,
        "delta_upper": delta_upper,
        "u_bar": u_bar,
        "big_m_u": big_m_u,
        "big_m_uprime": big_m_uprime,
        "d": grid.d,
        "l": grid.l,
    }
    log_with_context(logger, "info", "Bounds computed", **setup)

    heuristic = None
    if config.heuristic and instance.sense.is_max:
        heuristic = primal_heuristic(
            instance, ctx, budget(config.heuristic_time_limit), backend, config.heuristic_top_share
        )
    if heuristic is not None:
        ctx = replace(ctx, z_lb=heuristic[1])
        setup["z_lb"] = heuristic[1]

    if config.svi and instance.sense.is_max and config.model == "enhanced" and ctx.z_lb is not None:
        floors = compute_theta_floors(grid, ctx.z_lb, u_bar)
        ctx = replace(ctx, theta_floors=tuple(floors))
        setup["theta_floors"] = [f if math.isfinite(f) else None for f in floors]
    return ctx, setup, heuristic


def build_model(instance: ProblemInstance, ctx: BoundContext, kind: BoundKind) -> MilpModel:
    """RMP of the requested flavour with SVIs attached when the context has floors."""
    if BoundKind(kind) is BoundKind.BASELINE:
        return build_baseline_rmp(instance, ctx.grid, ctx)
    model = build_enhanced_rmp(instance, ctx.grid, ctx)
    if ctx.theta_floors is not None and instance.sense.is_max:
        attach_svis(model, ctx.grid, ctx.theta_floors)
    return model


def solve(
    instance: ProblemInstance,
    config: Optional[SolverConfig] = None,
    backend: Optional[MilpBackend] = None,
) -> SolveResult:
    """
    Run the cutting-plane algorithm.

    Args:
        instance: Problem instance
        config: Solver parameters (defaults if None)
        backend: MILP backend (from config.backend if None)

    Returns:
        SolveResult with the incumbent, bounds and per-iteration trace
    """
    config = config or SolverConfig()
    backend = backend or get_milp_backend(config.backend)
    started = time.monotonic()
    deadline = started + config.total_time_limit
    maximize = instance.sense.is_max

    if not instance.region.is_row_symmetric():
        log_with_context(logger, "debug", "Rows are not interchangeable; ordering row means by binary",
                         label=instance.label)

    try:
        ctx, setup, heuristic = build_context(instance, config, backend, deadline)
    except InfeasibleRegionError as e:
        log_with_context(logger, "info", "Instance infeasible", label=instance.label, error=str(e))
        return SolveResult(
            status=SolveStatus.INFEASIBLE, incumbent=None, lb=-math.inf, ub=math.inf, gap=math.inf,
            iterations=0, cuts_added=0, wall_time=time.monotonic() - started, maximize=maximize,
        )

    incumbent: Optional[SelectionPair] = None
    lb, ub = -math.inf, math.inf
    if heuristic is not None:
        incumbent, lb = heuristic

    model = build_model(instance, ctx, BoundKind(config.model))
    names = selection_names(instance.n)
    pool = CutPool()
    trace: List[IterationRecord] = []
    iterations = 0
    status: Optional[SolveStatus] = None

    while status is None:
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            status = SolveStatus.TIME_LIMIT
            break

        outcome = backend.solve(model, min(config.rmp_time_limit, remaining))
        elapsed = time.monotonic() - started

        if outcome.status is OutcomeStatus.INFEASIBLE:
            if incumbent is not None:
                status = SolveStatus.OPTIMAL
                if maximize:
                    ub = lb
                else:
                    lb = ub
            else:
                status = SolveStatus.INFEASIBLE
            trace.append(IterationRecord(iterations, lb, ub, None, None, None, elapsed))
            break
        if outcome.status is OutcomeStatus.TIME_LIMIT_NO_INCUMBENT:
            trace.append(IterationRecord(iterations, lb, ub, None, None, None, elapsed))
            status = SolveStatus.TIME_LIMIT
            break

        if outcome.dual_bound is not None:
            raw = outcome.dual_bound
        elif outcome.status is OutcomeStatus.OPTIMAL:
            raw = outcome.objective_value
        else:
            raw = math.inf if maximize else -math.inf

        x_hat = SelectionPair.from_flat(outcome.selection(names))
        value = expected_max(pair_moments(instance.gaussian, x_hat))
        if maximize:
            if value > lb:
                lb, incumbent = value, x_hat
            ub = min(ub, max(raw, lb))
        else:
            if value < ub:
                ub, incumbent = value, x_hat
            lb = max(lb, min(raw, ub))

        gap = relative_gap(lb, ub, maximize)
        trace.append(IterationRecord(iterations, lb, ub, raw, value, x_hat.fingerprint(), elapsed))
        log_with_context(logger, "debug", "Cutting-plane iteration", iteration=iterations, lb=lb, ub=ub,
                         raw_bound=raw, objective=value, selection=x_hat.fingerprint(), wall_time=elapsed)

        if gap < config.tolerance:
            status = SolveStatus.OPTIMAL
        elif config.gap_limit is not None and gap < config.gap_limit:
            status = SolveStatus.GAP_LIMIT
        else:
            cut = pool.add(x_hat)
            model.add_constraint(
                [(x_name(i, j), c) for i, j, c in cut.terms],
                cut.relation, cut.rhs, name=f"cut_{iterations}", lazy=True,
            )
            iterations += 1

    wall_time = time.monotonic() - started
    result = SolveResult(
        status=status,
        incumbent=incumbent,
        lb=lb,
        ub=ub,
        gap=relative_gap(lb, ub, maximize),
        iterations=iterations,
        cuts_added=len(pool),
        wall_time=wall_time,
        maximize=maximize,
        trace=tuple(trace),
        setup=setup,
    )
    log_with_context(logger, "info", "Cutting-plane solve finished", status=status.value, lb=lb, ub=ub,
                     gap=result.gap, iterations=iterations, wall_time=wall_time, model=config.model)
    return result
