"""
Moments of two linear selections and the closed-form expected maximum.
"""
from dataclasses import dataclass

import numpy as np

from shared.config.constants import THETA_CLAMP_TOLERANCE
from shared.errors import CovarianceError, DimensionMismatchError
from tools.gaussian.normal import (
    cdf_of_ratio,
    cdf_of_ratio_array,
    phi_term,
    phi_term_array,
)
from tools.gaussian.types import GaussianVector, PairMoments, SelectionPair


def _clamped_theta2(v1: float, v2: float, c12: float) -> float:
    theta2 = v1 + v2 - 2.0 * c12
    if theta2 < 0:
        if theta2 < -THETA_CLAMP_TOLERANCE * max(v1, v2, 1.0):
            raise CovarianceError(f"negative variance of Z1 - Z2: {theta2:.3e}")
        theta2 = 0.0
    return theta2


def pair_moments(g: GaussianVector, x: SelectionPair) -> PairMoments:
    """
    Means, variances and covariance of Z1(x) and Z2(x).

    Rows are swapped when needed so that e1 >= e2.

    Raises:
        DimensionMismatchError: If x and g have different n
    """
    if x.n != g.n:
        raise DimensionMismatchError(f"selection has n={x.n}, gaussian vector has n={g.n}")

    rows = x.x.astype(float)
    means = rows @ g.mu
    if means[0] < means[1]:
        rows = rows[::-1]
        means = means[::-1]
    cross = rows @ g.sigma @ rows.T

    v1, v2, c12 = float(cross[0, 0]), float(cross[1, 1]), float(cross[0, 1])
    theta2 = _clamped_theta2(v1, v2, c12)
    e1, e2 = float(means[0]), float(means[1])
    return PairMoments(
        e1=e1,
        e2=e2,
        v1=v1,
        v2=v2,
        c12=c12,
        delta=e1 - e2,
        theta=float(np.sqrt(theta2)),
    )


def expected_max(m: PairMoments) -> float:
    """E[max(Z1, Z2)] = e1 Phi(d/t) + e2 Phi(-d/t) + t phi(d/t)."""
    return (
        m.e1 * cdf_of_ratio(m.delta, m.theta)
        + m.e2 * cdf_of_ratio(-m.delta, m.theta)
        + phi_term(m.theta, m.delta)
    )


def expected_min(m: PairMoments) -> float:
    """E[min(Z1, Z2)] = e1 + e2 - E[max(Z1, Z2)]."""
    return m.e1 + m.e2 - expected_max(m)


@dataclass(frozen=True)
class MomentsBatch:
    """Row-wise moments of many selections.

    ``e1``/``e2`` keep the stored row order; ``delta`` and ``theta`` are
    the canonical (ordered) quantities.
    """

    e1: np.ndarray
    e2: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    c12: np.ndarray
    theta2: np.ndarray

    @property
    def e_high(self) -> np.ndarray:
        return np.maximum(self.e1, self.e2)

    @property
    def e_low(self) -> np.ndarray:
        return np.minimum(self.e1, self.e2)

    @property
    def delta(self) -> np.ndarray:
        return np.abs(self.e1 - self.e2)

    @property
    def theta(self) -> np.ndarray:
        return np.sqrt(self.theta2)


def batch_pair_moments(g: GaussianVector, selections: np.ndarray) -> MomentsBatch:
    """
    Moments of a batch of flattened selections.

    Args:
        g: Gaussian vector
        selections: (K, 2n) array, row-major flattened selection pairs

    Returns:
        MomentsBatch with arrays of length K
    """
    selections = np.asarray(selections, dtype=float)
    if selections.ndim != 2 or selections.shape[1] != 2 * g.n:
        raise DimensionMismatchError(f"expected selections of shape (K, {2 * g.n}), got {selections.shape}")

    n = g.n
    first, second = selections[:, :n], selections[:, n:]
    first_sigma = first @ g.sigma
    v1 = np.einsum("kj,kj->k", first_sigma, first)
    c12 = np.einsum("kj,kj->k", first_sigma, second)
    v2 = np.einsum("kj,kj->k", second @ g.sigma, second)

    theta2 = v1 + v2 - 2.0 * c12
    scale = np.maximum(np.maximum(v1, v2), 1.0)
    if np.any(theta2 < -THETA_CLAMP_TOLERANCE * scale):
        raise CovarianceError("negative variance of Z1 - Z2 in batch")
    theta2 = np.maximum(theta2, 0.0)

    return MomentsBatch(
        e1=first @ g.mu,
        e2=second @ g.mu,
        v1=v1,
        v2=v2,
        c12=c12,
        theta2=theta2,
    )


def batch_expected_max(batch: MomentsBatch) -> np.ndarray:
    """Vectorized expected_max over a MomentsBatch."""
    delta, theta = batch.delta, batch.theta
    return (
        batch.e_high * cdf_of_ratio_array(delta, theta)
        + batch.e_low * cdf_of_ratio_array(-delta, theta)
        + phi_term_array(theta, delta)
    )
