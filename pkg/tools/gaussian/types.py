"""
Value types for Gaussian vectors, selection pairs and their moments.
"""
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from shared.config.constants import PSD_TOLERANCE
from shared.errors import CovarianceError, DimensionMismatchError


def _frozen_array(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class GaussianVector:
    """Means and covariance of n jointly Gaussian components."""

    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        mu = _frozen_array(self.mu, float)
        sigma = _frozen_array(self.sigma, float)
        if mu.ndim != 1 or mu.size == 0:
            raise DimensionMismatchError(f"mu must be a nonempty vector, got shape {mu.shape}")
        n = mu.size
        if sigma.shape != (n, n):
            raise DimensionMismatchError(f"sigma must be {n}x{n}, got shape {sigma.shape}")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(sigma))):
            raise CovarianceError("mu and sigma must be finite")

        asymmetric = np.argwhere(sigma != sigma.T)
        if asymmetric.size:
            j, k = (int(v) for v in asymmetric[0])
            raise CovarianceError(f"sigma is not symmetric: sigma[{j}][{k}] != sigma[{k}][{j}]")

        diagonal = np.diag(sigma)
        if np.any(diagonal < 0):
            j = int(np.argmin(diagonal))
            raise CovarianceError(f"negative variance sigma[{j}][{j}] = {diagonal[j]}")

        min_eig = float(np.linalg.eigvalsh(sigma).min())
        if min_eig < -PSD_TOLERANCE * float(diagonal.max()):
            raise CovarianceError(f"sigma is not positive semidefinite (smallest eigenvalue {min_eig:.3e})")

        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def n(self) -> int:
        return int(self.mu.size)

    @property
    def variances(self) -> np.ndarray:
        return np.diag(self.sigma)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GaussianVector):
            return NotImplemented
        return np.array_equal(self.mu, other.mu) and np.array_equal(self.sigma, other.sigma)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SelectionPair:
    """A 2 x n binary selection; row i chooses the components of Z_i."""

    x: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, copy=True)
        if x.ndim != 2 or x.shape[0] != 2:
            raise DimensionMismatchError(f"selection must have shape (2, n), got {x.shape}")
        if not np.all((x == 0) | (x == 1)):
            raise ValueError("selection entries must be exactly 0 or 1")
        x = x.astype(np.int8)
        x.setflags(write=False)
        object.__setattr__(self, "x", x)

    @classmethod
    def from_rows(cls, row1: Sequence[int], row2: Sequence[int]) -> "SelectionPair":
        return cls(np.array([row1, row2]))

    @classmethod
    def from_flat(cls, values: Sequence[int]) -> "SelectionPair":
        """Build from a row-major vector of length 2n."""
        flat = np.asarray(values)
        if flat.ndim != 1 or flat.size % 2:
            raise DimensionMismatchError(f"flat selection must have even length, got {flat.size}")
        return cls(np.rint(flat).astype(np.int8).reshape(2, -1))

    @classmethod
    def empty(cls, n: int) -> "SelectionPair":
        return cls(np.zeros((2, n), dtype=np.int8))

    @property
    def n(self) -> int:
        return int(self.x.shape[1])

    def flat(self) -> np.ndarray:
        return self.x.reshape(-1)

    def swapped(self) -> "SelectionPair":
        return SelectionPair(self.x[::-1])

    def fingerprint(self) -> str:
        """Stable text key, row-major bits with a separator between rows."""
        return "".join(map(str, self.x[0])) + "|" + "".join(map(str, self.x[1]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SelectionPair):
            return NotImplemented
        return np.array_equal(self.x, other.x)

    def __hash__(self) -> int:
        return hash(self.fingerprint())

    def __repr__(self) -> str:
        return f"SelectionPair({self.fingerprint()})"


@dataclass(frozen=True)
class PairMoments:
    """Moments of (Z1, Z2) under the canonical ordering e1 >= e2."""

    e1: float
    e2: float
    v1: float
    v2: float
    c12: float
    delta: float
    theta: float

    @property
    def theta2(self) -> float:
        return self.theta * self.theta
