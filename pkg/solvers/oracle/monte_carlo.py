"""
Monte-Carlo estimate of E[max(Z1(x), Z2(x))].
"""
import math
from typing import Tuple

from shared.errors import DimensionMismatchError, PreconditionError
from tools.gaussian.sampling import sample
from tools.gaussian.types import SelectionPair
from tools.instances.problem import ProblemInstance
from tools.instances.region import is_feasible

MIN_SAMPLES = 1000


def monte_carlo(instance: ProblemInstance, x: SelectionPair, samples: int, seed: int) -> Tuple[float, float]:
    """
    Sample mean of max(Z1, Z2) and its standard error.

    Args:
        instance: Problem instance
        x: Feasible selection
        samples: Number of draws (at least 1000)
        seed: Generator seed

    Returns:
        (estimate, stderr) with stderr = sample std / sqrt(samples)

    Raises:
        PreconditionError: On too few samples or an infeasible x
    """
    if samples < MIN_SAMPLES:
        raise PreconditionError(f"monte_carlo needs at least {MIN_SAMPLES} samples, got {samples}")
    if x.n != instance.n:
        raise DimensionMismatchError(f"selection has n={x.n}, instance has n={instance.n}")
    if not is_feasible(instance.region, x):
        raise PreconditionError(f"selection {x.fingerprint()} is not feasible")

    draws = sample(instance.gaussian, samples, seed)
    totals = draws @ x.x.T.astype(float)
    maxima = totals.max(axis=1)
    return float(maxima.mean()), float(maxima.std(ddof=1) / math.sqrt(samples))
