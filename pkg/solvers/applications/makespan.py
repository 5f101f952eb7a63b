"""
Two-machine makespan with normally distributed processing times.

Row i of the selection holds the jobs of machine i; every job runs on
exactly one machine, so E[C_max] = E[max(Z1, Z2)] is minimized.
"""
from typing import Literal, Tuple

import numpy as np

from shared.config.constants import (
    MAKESPAN_CLUSTERS,
    MAKESPAN_MEAN,
    MAKESPAN_VARIANCE,
    MAKESPAN_VARIANCE_SHARE,
    MAX_EXACT_MAKESPAN_JOBS,
)
from shared.errors import EnumerationLimitError, PreconditionError
from shared.logging.logger import setup_logger, log_with_context
from shared.models.applications import MakespanSpec
from tools.gaussian.types import GaussianVector
from tools.instances.problem import ProblemInstance, Sense
from tools.instances.region import FeasibleRegion, partition_constraints

logger = setup_logger(__name__)

_CODES_PER_BLOCK = 1 << 16


def gen_makespan(spec: MakespanSpec) -> ProblemInstance:
    """
    Build a makespan instance.

    mu_j ~ N(20, 9) redrawn until positive, sigma_j^2 ~ U(0, 0.1 mu_j^2 eta);
    jobs in the same cluster have correlation one, other pairs zero.
    """
    means_rng, variances_rng, clusters_rng = (
        np.random.default_rng(s) for s in np.random.SeedSequence(spec.seed).spawn(3)
    )
    mu = np.empty(spec.n)
    for j in range(spec.n):
        value = means_rng.normal(MAKESPAN_MEAN, np.sqrt(MAKESPAN_VARIANCE))
        while value <= 0:
            value = means_rng.normal(MAKESPAN_MEAN, np.sqrt(MAKESPAN_VARIANCE))
        mu[j] = value
    variances = variances_rng.uniform(0.0, MAKESPAN_VARIANCE_SHARE * mu**2 * spec.eta)

    if spec.clusters is not None:
        clusters = np.asarray(spec.clusters)
    else:
        clusters = clusters_rng.choice(np.asarray(MAKESPAN_CLUSTERS), size=spec.n)

    std = np.sqrt(variances)
    if spec.correlated:
        same = clusters[:, None] == clusters[None, :]
        sigma = np.where(same, np.outer(std, std), 0.0)
        np.fill_diagonal(sigma, variances)
    else:
        sigma = np.diag(variances)

    kind = "ms" if spec.correlated else "msu"
    return ProblemInstance(
        gaussian=GaussianVector(mu, sigma),
        region=FeasibleRegion(spec.n, partition_constraints(spec.n)),
        sense=Sense.MINIMIZE,
        label=f"{kind}_n{spec.n}_e{spec.eta:g}_s{spec.seed}",
        family="ms",
        param=spec.eta,
        seed=spec.seed,
    )


def _lpt(mu: np.ndarray) -> Tuple[np.ndarray, float]:
    loads = [0.0, 0.0]
    side = np.zeros(mu.size, dtype=np.int8)
    for j in sorted(range(mu.size), key=lambda k: mu[k], reverse=True):
        machine = 0 if loads[0] <= loads[1] else 1
        side[j] = machine
        loads[machine] += mu[j]
    return side, max(loads)


def _exact(mu: np.ndarray) -> Tuple[np.ndarray, float]:
    n = mu.size
    if n > MAX_EXACT_MAKESPAN_JOBS:
        raise EnumerationLimitError(
            f"exact makespan supports at most {MAX_EXACT_MAKESPAN_JOBS} jobs, got {n}"
        )
    total = float(mu.sum())
    best_code, best_value = 0, np.inf
    shifts = np.arange(n - 1, dtype=np.int64)
    # Job 0 stays on machine 0
    for start in range(0, 1 << (n - 1), _CODES_PER_BLOCK):
        codes = np.arange(start, min(start + _CODES_PER_BLOCK, 1 << (n - 1)), dtype=np.int64)
        bits = ((codes[:, None] >> shifts) & 1).astype(float)
        second = bits @ mu[1:]
        spans = np.maximum(second, total - second)
        k = int(np.argmin(spans))
        if spans[k] < best_value:
            best_code, best_value = int(codes[k]), float(spans[k])
    side = np.zeros(n, dtype=np.int8)
    side[1:] = (best_code >> shifts) & 1
    return side, best_value


def deterministic_makespan_opt(
    mu: np.ndarray,
    mode: Literal["exact", "lpt"] = "exact",
) -> Tuple[np.ndarray, float]:
    """
    Two-machine partition of deterministic processing times.

    Args:
        mu: Positive job lengths
        mode: "exact" enumerates every partition (at most 24 jobs); "lpt"
            assigns jobs longest first to the less loaded machine

    Returns:
        (machine index per job, makespan)

    Raises:
        PreconditionError: If a length is not positive
        EnumerationLimitError: If exact mode gets more than 24 jobs
    """
    mu = np.asarray(mu, dtype=float)
    if mu.ndim != 1 or mu.size == 0:
        raise PreconditionError("mu must be a nonempty vector")
    if np.any(mu <= 0):
        raise PreconditionError("processing times must be positive")
    if mode == "lpt":
        return _lpt(mu)
    if mode != "exact":
        raise PreconditionError(f"unknown mode {mode}")
    side, value = _exact(mu)
    log_with_context(logger, "debug", "Deterministic makespan solved", n=int(mu.size), makespan=value)
    return side, value
