"""
Exhaustive enumeration of the feasible selections of an instance.
"""
import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from shared.config.constants import DEFAULT_ENUMERATION_LIMIT
from shared.errors import EnumerationLimitError, InfeasibleRegionError
from shared.logging.logger import setup_logger, log_with_context
from tools.gaussian.moments import batch_expected_max, batch_pair_moments
from tools.gaussian.types import SelectionPair
from tools.instances.problem import ProblemInstance
from tools.milp.fallback import SelectionEnumerator

logger = setup_logger(__name__)


@dataclass(frozen=True)
class OracleResult:
    """Optimum found by complete enumeration."""
    best_x: SelectionPair
    best_value: float
    evaluated: int


def feasible_batches(instance: ProblemInstance, limit: int = DEFAULT_ENUMERATION_LIMIT) -> Iterator[np.ndarray]:
    """
    Yield (K, 2n) batches of feasible flattened selections in lexicographic order.

    Raises:
        EnumerationLimitError: Once more than ``limit`` selections were produced
    """
    region = instance.region
    enumerator = SelectionEnumerator(
        size=2 * instance.n,
        matrix=region.matrix,
        relations=region.relations,
        rhs=region.rhs,
        allowed=[(0, 1)] * (2 * instance.n),
    )
    produced = 0
    for batch in enumerator.batches(math.inf):
        batch = batch[region.feasible_mask(batch)]
        if batch.shape[0] == 0:
            continue
        produced += batch.shape[0]
        if produced > limit:
            raise EnumerationLimitError(
                f"instance {instance.label or '<unnamed>'} has more than {limit} feasible selections"
            )
        yield batch


def brute_force(instance: ProblemInstance, limit: int = DEFAULT_ENUMERATION_LIMIT) -> OracleResult:
    """
    Optimal selection by evaluating the exact objective on every feasible x.

    Ties keep the first selection in enumeration order.

    Args:
        instance: Problem instance (its sense picks max or min)
        limit: Maximum number of feasible selections evaluated

    Returns:
        OracleResult

    Raises:
        EnumerationLimitError: If Omega has more than ``limit`` points
        InfeasibleRegionError: If Omega is empty
    """
    maximize = instance.sense.is_max
    best_value: Optional[float] = None
    best_flat: Optional[np.ndarray] = None
    evaluated = 0

    for batch in feasible_batches(instance, limit):
        values = batch_expected_max(batch_pair_moments(instance.gaussian, batch))
        k = int(np.argmax(values) if maximize else np.argmin(values))
        evaluated += batch.shape[0]
        candidate = float(values[k])
        if best_value is None or (candidate > best_value if maximize else candidate < best_value):
            best_value, best_flat = candidate, batch[k].copy()

    if best_flat is None:
        raise InfeasibleRegionError(f"instance {instance.label or '<unnamed>'} has no feasible selection")

    log_with_context(logger, "debug", "Brute force finished", label=instance.label,
                     evaluated=evaluated, best_value=best_value)
    return OracleResult(SelectionPair.from_flat(best_flat), best_value, evaluated)
