"""
External backend: hands a MilpModel to CBC through PuLP.

CBC reports no dual bound for interrupted solves, so a time-limited solve
that stops with an integer-feasible incumbent returns no dual bound and the
caller decides how to bound it.
"""
import math
import time
from typing import Dict, Optional

import pulp as plp
from tenacity import retry, stop_after_attempt, wait_exponential, retry_if_exception_type

from shared.config.constants import (
    MAX_RETRIES,
    MILP_GAP,
    RETRY_BACKOFF_FACTOR,
    RETRY_MAX_WAIT,
    RETRY_MIN_WAIT,
)
from shared.config.settings import get_settings
from shared.errors import ModelError, PreconditionError
from shared.logging.logger import setup_logger, log_with_context
from tools.instances.region import Relation
from tools.milp.model import MilpModel, MilpOutcome, ModelSense, OutcomeStatus, VarKind

logger = setup_logger(__name__)

# Retry policy for solver process failures
retry_policy = retry(
    stop=stop_after_attempt(MAX_RETRIES),
    wait=wait_exponential(multiplier=RETRY_BACKOFF_FACTOR, min=RETRY_MIN_WAIT, max=RETRY_MAX_WAIT),
    retry=retry_if_exception_type(plp.PulpSolverError),
    reraise=True,
)


def _bound(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


def gap_slack(value: float) -> float:
    """Distance from an OPTIMAL incumbent to a bound CBC's gap test certifies."""
    return 2.0 * MILP_GAP * max(1.0, abs(value))


class PulpBackend:
    """CBC through PuLP; lazy constraints are passed as ordinary rows."""

    name = "external"

    def __init__(self, solver_path: Optional[str] = None, threads: Optional[int] = None):
        settings = get_settings()
        self.solver_path = solver_path or settings.milp_solver_path
        self.threads = threads or settings.milp_threads

    def _translate(self, model: MilpModel):
        sense = plp.LpMaximize if model.objective.sense is ModelSense.MAXIMIZE else plp.LpMinimize
        problem = plp.LpProblem(model.name or "model", sense)

        lp_variables: Dict[str, plp.LpVariable] = {}
        for index, variable in enumerate(model.variables):
            category = plp.LpBinary if variable.kind is VarKind.BINARY else plp.LpContinuous
            lp_variables[variable.name] = plp.LpVariable(
                f"v{index}",
                lowBound=_bound(variable.lower),
                upBound=_bound(variable.upper),
                cat=category,
            )

        problem += (
            plp.lpSum(c * lp_variables[name] for name, c in model.objective.terms) + model.objective.constant,
            "objective",
        )
        for index, constraint in enumerate(model.constraints):
            expression = plp.lpSum(c * lp_variables[name] for name, c in constraint.terms)
            if constraint.relation is Relation.LE:
                problem += (expression <= constraint.rhs, f"c{index}")
            elif constraint.relation is Relation.GE:
                problem += (expression >= constraint.rhs, f"c{index}")
            else:
                problem += (expression == constraint.rhs, f"c{index}")
        return problem, lp_variables

    @retry_policy
    def _run(self, problem: plp.LpProblem, time_limit: float) -> None:
        solver = plp.PULP_CBC_CMD(
            msg=False,
            timeLimit=max(1, int(math.ceil(time_limit))),
            gapRel=MILP_GAP,
            gapAbs=MILP_GAP,
            threads=self.threads,
            path=self.solver_path,
        )
        problem.solve(solver)

    def solve(self, model: MilpModel, time_limit: float) -> MilpOutcome:
        """
        Solve a model with CBC.

        Raises:
            ModelError: If the model is malformed or unbounded
            PulpSolverError: If CBC keeps failing after retries
        """
        if time_limit <= 0:
            raise PreconditionError(f"time_limit must be positive, got {time_limit}")
        model.validate()
        started = time.monotonic()
        problem, lp_variables = self._translate(model)
        self._run(problem, time_limit)
        wall_time = time.monotonic() - started

        status = problem.sol_status
        if status == plp.LpSolutionUnbounded:
            raise ModelError(f"model {model.name or '<unnamed>'} is unbounded")
        if status == plp.LpSolutionInfeasible:
            return MilpOutcome(status=OutcomeStatus.INFEASIBLE, wall_time=wall_time, backend=self.name)
        if status not in (plp.LpSolutionOptimal, plp.LpSolutionIntegerFeasible):
            log_with_context(logger, "warning", "CBC stopped without an incumbent",
                             model=model.name, time_limit=time_limit)
            return MilpOutcome(status=OutcomeStatus.TIME_LIMIT_NO_INCUMBENT, wall_time=wall_time, backend=self.name)

        assignment = {}
        for variable in model.variables:
            value = lp_variables[variable.name].varValue
            if value is None:
                value = variable.lower if math.isfinite(variable.lower) else 0.0
            if variable.kind is VarKind.BINARY:
                value = float(round(value))
            assignment[variable.name] = float(value)
        value = model.objective.value(assignment)

        if status == plp.LpSolutionOptimal:
            # CBC stops within gapRel/gapAbs of its best bound, which PuLP does not return
            slack = gap_slack(value)
            maximize = model.objective.sense is ModelSense.MAXIMIZE
            outcome_status, dual_bound = OutcomeStatus.OPTIMAL, value + slack if maximize else value - slack
        else:
            outcome_status, dual_bound = OutcomeStatus.FEASIBLE_WITH_BOUND, None

        log_with_context(logger, "debug", "CBC solve finished", model=model.name,
                         status=outcome_status.value, objective=value, wall_time=wall_time)
        return MilpOutcome(
            status=outcome_status,
            incumbent=assignment,
            objective_value=value,
            dual_bound=dual_bound,
            wall_time=wall_time,
            backend=self.name,
        )
