"""
Checks of the structural results for uncorrelated two-machine makespan.

With independent jobs theta(x) is the same for every partition, so the
expected makespan only depends on the load difference and the stochastic
and deterministic problems share their optimal partitions. Scaling the
variances so that theta equals the width of uniform delta intervals makes
the enhanced bound at most 2.005 times the objective.
"""
import math
from typing import Tuple

import numpy as np

from shared.config.constants import DEFAULT_ENUMERATION_LIMIT, THEOREM3_FACTOR
from shared.errors import PreconditionError
from shared.logging.logger import setup_logger, log_with_context
from shared.models.applications import Theorem2Report, Theorem3Report
from solvers.applications.makespan import deterministic_makespan_opt
from solvers.oracle.enumeration import brute_force, feasible_batches
from tools.gaussian.moments import batch_expected_max, batch_pair_moments, pair_moments
from tools.gaussian.normal import cdf_of_ratio_array, phi_term_array
from tools.gaussian.types import GaussianVector
from tools.instances.problem import ProblemInstance, Sense
from tools.instances.region import Relation

logger = setup_logger(__name__)

_TOLERANCE = 1e-9


def _require_uncorrelated_partition(instance: ProblemInstance) -> None:
    sigma = instance.gaussian.sigma
    if np.any(sigma[~np.eye(instance.n, dtype=bool)] != 0):
        raise PreconditionError("the makespan checks need uncorrelated jobs (zero off-diagonal sigma)")
    assigned = set()
    for constraint in instance.region.constraints:
        columns = {j for _, j, _ in constraint.terms}
        rows = sorted(i for i, _, _ in constraint.terms)
        if (
            constraint.relation is Relation.EQ
            and constraint.rhs == 1.0
            and len(columns) == 1
            and rows == [0, 1]
            and all(c == 1.0 for _, _, c in constraint.terms)
        ):
            assigned |= columns
    if assigned != set(range(instance.n)):
        raise PreconditionError("the makespan checks need x[0, j] + x[1, j] = 1 for every job")


def _enumerate_values(instance: ProblemInstance, limit: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(e_high, e_low, theta2, expected max) over every feasible selection."""
    highs, lows, thetas, values = [], [], [], []
    for batch in feasible_batches(instance, limit):
        moments = batch_pair_moments(instance.gaussian, batch)
        highs.append(moments.e_high)
        lows.append(moments.e_low)
        thetas.append(moments.theta2)
        values.append(batch_expected_max(moments))
    return (np.concatenate(highs), np.concatenate(lows), np.concatenate(thetas), np.concatenate(values))


def check_theorem2(instance: ProblemInstance, limit: int = DEFAULT_ENUMERATION_LIMIT) -> Theorem2Report:
    """
    Equivalence of stochastic and deterministic makespan for independent jobs.

    Checks that theta(x) is constant over the feasible partitions, that the
    stochastic optimum's deterministic makespan equals the deterministic
    optimum, and that E[C_max] is nondecreasing in the deterministic
    makespan (ties within 1e-9).

    Raises:
        PreconditionError: If jobs are correlated or not all assigned
    """
    _require_uncorrelated_partition(instance)
    instance = instance.with_sense(Sense.MINIMIZE)
    e_high, _, theta2, values = _enumerate_values(instance, limit)
    theta = np.sqrt(theta2)

    theta_spread = float(theta.max() - theta.min())
    theta_constant = theta_spread <= _TOLERANCE * max(1.0, float(theta.max()))

    optimum = brute_force(instance, limit)
    stochastic_makespan = pair_moments(instance.gaussian, optimum.best_x).e1
    _, deterministic = deterministic_makespan_opt(instance.gaussian.mu)
    scale = max(1.0, deterministic)
    argmin_match = abs(stochastic_makespan - deterministic) <= _TOLERANCE * scale

    order = np.argsort(e_high, kind="stable")
    steps = np.diff(e_high[order])
    rises = np.diff(values[order])
    value_scale = _TOLERANCE * max(1.0, float(np.abs(values).max()))
    ties = steps <= _TOLERANCE * scale
    monotone = bool(np.all(np.where(ties, np.abs(rises) <= value_scale, rises >= -value_scale)))

    report = Theorem2Report(
        n=instance.n,
        evaluated=int(values.size),
        theta=float(theta.max()),
        theta_spread=theta_spread,
        theta_constant=bool(theta_constant),
        stochastic_value=optimum.best_value,
        stochastic_makespan=float(stochastic_makespan),
        deterministic_makespan=float(deterministic),
        argmin_match=bool(argmin_match),
        monotone=monotone,
        passed=bool(theta_constant and argmin_match and monotone),
    )
    log_with_context(logger, "info", "Makespan equivalence checked", label=instance.label, **report.model_dump())
    return report


def scale_for_uniform_delta(instance: ProblemInstance, l: int) -> Tuple[ProblemInstance, float]:
    """
    Rescale the variances so theta equals the width of l uniform delta intervals on [0, sum(mu)].

    Returns:
        (scaled instance, interval width)
    """
    if l < 1:
        raise PreconditionError(f"l must be at least 1, got {l}")
    variances = instance.gaussian.variances
    total = float(variances.sum())
    if total <= 0:
        raise PreconditionError("theta is zero; variances cannot be rescaled")
    width = float(instance.gaussian.mu.sum()) / l
    factor = width * width / total
    scaled = GaussianVector(instance.gaussian.mu, np.diag(variances * factor))
    return ProblemInstance(
        gaussian=scaled,
        region=instance.region,
        sense=instance.sense,
        label=instance.label,
        family=instance.family,
        param=instance.param,
        seed=instance.seed,
    ), width


def check_theorem3(instance: ProblemInstance, l: int = 10, limit: int = DEFAULT_ENUMERATION_LIMIT) -> Theorem3Report:
    """
    2.005-approximation of the enhanced bound for independent jobs.

    The instance is rescaled with scale_for_uniform_delta. For every
    feasible x the bound uses l_theta = u_theta = theta and the largest
    value over the delta intervals containing delta(x). The selection that
    minimizes the bound must have E[C_max] within 2.005 of the optimum.

    Raises:
        PreconditionError: If jobs are correlated, not all assigned, or all variances are zero
    """
    _require_uncorrelated_partition(instance)
    scaled, width = scale_for_uniform_delta(instance.with_sense(Sense.MINIMIZE), l)
    e_high, e_low, theta2, values = _enumerate_values(scaled, limit)
    theta = np.sqrt(theta2)
    delta = e_high - e_low

    breaks = np.arange(l + 1) * width
    tol = 1e-9 * max(1.0, float(breaks[-1]))
    lower, upper = breaks[None, :-1], breaks[None, 1:]
    inside = (delta[:, None] >= lower - tol) & (delta[:, None] <= upper + tol)
    p = cdf_of_ratio_array(upper, theta[:, None])
    bounds = e_high[:, None] * p + e_low[:, None] * (1.0 - p) + phi_term_array(theta[:, None], lower)
    g = np.where(inside, bounds, -np.inf).max(axis=1)

    factors = g / values
    max_factor = float(factors.max())
    chosen = int(np.argmin(g))
    optimum = float(values.min())
    rmp_factor = float(values[chosen] / optimum)
    passed = max_factor <= THEOREM3_FACTOR and float(g[chosen]) <= THEOREM3_FACTOR * optimum + tol

    report = Theorem3Report(
        n=scaled.n,
        l=l,
        evaluated=int(values.size),
        interval_width=width,
        max_factor=max_factor,
        rmp_value=float(g[chosen]),
        rmp_selection_value=float(values[chosen]),
        optimum=optimum,
        rmp_factor=rmp_factor,
        passed=bool(passed and not math.isnan(max_factor)),
    )
    log_with_context(logger, "info", "Approximation factor checked", label=instance.label, **report.model_dump())
    return report
