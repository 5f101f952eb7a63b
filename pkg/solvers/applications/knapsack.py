"""
Two-knapsack instances: each row of the selection is one knapsack.

Every field is drawn from its own stream spawned from the seed, so adding
a field never changes the others.
"""
import numpy as np

from shared.config.constants import KNAPSACK_MEAN_RANGE, KNAPSACK_WEIGHT_RANGE
from shared.logging.logger import setup_logger, log_with_context
from shared.models.applications import KnapsackSpec
from tools.gaussian.types import GaussianVector
from tools.instances.problem import ProblemInstance, Sense
from tools.instances.region import FeasibleRegion, Relation, disjointness_constraints, row_constraint

logger = setup_logger(__name__)


def random_psd(n: int, rng: np.random.Generator) -> np.ndarray:
    """Q^T D Q with Q orthogonal (QR of a standard-normal matrix) and D ~ U(0, 1) diagonal."""
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    d = rng.uniform(0.0, 1.0, size=n)
    matrix = (q.T * d) @ q
    return 0.5 * (matrix + matrix.T)


def gen_knapsack(spec: KnapsackSpec) -> ProblemInstance:
    """
    Build a two-knapsack instance.

    Weights ~ U{1..19}, means ~ U(15, 25), sigma = alpha * random PSD, both
    capacities equal spec.capacity, and each item goes into at most one
    knapsack.
    """
    weights_rng, means_rng, sigma_rng = (
        np.random.default_rng(s) for s in np.random.SeedSequence(spec.seed).spawn(3)
    )
    low, high = KNAPSACK_WEIGHT_RANGE
    weights = weights_rng.integers(low, high + 1, size=spec.n)
    mu = means_rng.uniform(*KNAPSACK_MEAN_RANGE, size=spec.n)
    sigma = spec.alpha * random_psd(spec.n, sigma_rng)

    coefficients = {j: float(w) for j, w in enumerate(weights)}
    constraints = (
        row_constraint(0, coefficients, Relation.LE, spec.capacity, name="capacity_0"),
        row_constraint(1, coefficients, Relation.LE, spec.capacity, name="capacity_1"),
    ) + disjointness_constraints(spec.n)

    instance = ProblemInstance(
        gaussian=GaussianVector(mu, sigma),
        region=FeasibleRegion(spec.n, constraints),
        sense=Sense(spec.sense),
        label=f"kp_n{spec.n}_a{spec.alpha:g}_s{spec.seed}",
        family="kp",
        param=spec.alpha,
        seed=spec.seed,
    )
    log_with_context(logger, "debug", "Knapsack instance generated", label=instance.label,
                     total_weight=int(weights.sum()))
    return instance
