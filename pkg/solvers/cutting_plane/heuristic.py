"""
Primal heuristic: the enhanced RMP restricted to the higher-mean items.
"""
from typing import Optional, Tuple

import numpy as np

from shared.config.constants import DEFAULT_HEURISTIC_TIME_LIMIT, HEURISTIC_TOP_SHARE
from shared.errors import PreconditionError
from shared.logging.logger import setup_logger, log_with_context
from solvers.cutting_plane.rmp import BoundContext, build_enhanced_rmp, selection_names, x_name
from tools.gaussian.moments import expected_max, pair_moments
from tools.gaussian.types import SelectionPair
from tools.instances.problem import ProblemInstance
from tools.milp.client import MilpBackend, get_milp_backend

logger = setup_logger(__name__)


def primal_heuristic(
    instance: ProblemInstance,
    ctx: BoundContext,
    time_limit: float = DEFAULT_HEURISTIC_TIME_LIMIT,
    backend: Optional[MilpBackend] = None,
    top_share: float = HEURISTIC_TOP_SHARE,
) -> Optional[Tuple[SelectionPair, float]]:
    """
    Solve the enhanced RMP over items whose mean is in the top share.

    Items below the (1 - top_share) quantile of the means are fixed out of
    both rows.

    Args:
        instance: Maximization instance
        ctx: Grid and big-M constants
        time_limit: Seconds for the restricted solve
        backend: MILP backend (configured default if None)
        top_share: Share of items kept, by mean

    Returns:
        (selection, exact objective) or None when the solve finds nothing
    """
    if not instance.sense.is_max:
        raise PreconditionError("the primal heuristic is defined for maximization")
    if not 0 < top_share <= 1:
        raise PreconditionError(f"top_share must be in (0, 1], got {top_share}")

    backend = backend or get_milp_backend()
    mu = instance.gaussian.mu
    threshold = float(np.quantile(mu, 1.0 - top_share))
    excluded = [j for j in range(instance.n) if mu[j] < threshold]

    model = build_enhanced_rmp(instance, ctx.grid, ctx)
    model.name = "heuristic_rmp"
    for j in excluded:
        for i in range(2):
            model.fix_variable(x_name(i, j), 0.0)

    outcome = backend.solve(model, time_limit)
    if not outcome.has_incumbent:
        log_with_context(logger, "info", "Primal heuristic found no selection",
                         status=outcome.status.value, excluded=len(excluded))
        return None

    x = SelectionPair.from_flat(outcome.selection(selection_names(instance.n)))
    value = expected_max(pair_moments(instance.gaussian, x))
    log_with_context(logger, "info", "Primal heuristic finished", z_lb=value,
                     excluded=len(excluded), selection=x.fingerprint())
    return x, value
