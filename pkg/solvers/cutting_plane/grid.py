"""
Discretization grids for theta(x)^2 and delta(x).
"""
from dataclasses import dataclass

import numpy as np

from shared.errors import PreconditionError


def _frozen(values) -> np.ndarray:
    array = np.array(values, dtype=float, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class DiscretizationGrid:
    """
    Breakpoints of the theta-squared and delta ranges.

    Interval q of theta^2 is [theta2_breaks[q], theta2_breaks[q + 1]] with
    theta bounds theta_lower[q] <= theta <= theta_upper[q]; interval h of
    delta is [delta_breaks[h], delta_breaks[h + 1]].
    """

    theta2_breaks: np.ndarray
    delta_breaks: np.ndarray

    def __post_init__(self):
        theta2 = _frozen(self.theta2_breaks)
        delta = _frozen(self.delta_breaks)
        if theta2.size < 2 or delta.size < 2:
            raise PreconditionError("a grid needs at least one interval per dimension")
        if theta2[0] != 0.0 or delta[0] != 0.0:
            raise PreconditionError("grids start at 0")
        if np.any(np.diff(theta2) <= 0):
            raise PreconditionError("theta^2 breakpoints must be strictly ascending")
        if np.any(np.diff(delta) < 0):
            raise PreconditionError("delta breakpoints must be ascending")
        object.__setattr__(self, "theta2_breaks", theta2)
        object.__setattr__(self, "delta_breaks", delta)

    @property
    def d(self) -> int:
        return int(self.theta2_breaks.size - 1)

    @property
    def l(self) -> int:
        return int(self.delta_breaks.size - 1)

    @property
    def theta2_max(self) -> float:
        return float(self.theta2_breaks[-1])

    @property
    def delta_max(self) -> float:
        return float(self.delta_breaks[-1])

    @property
    def theta_lower(self) -> np.ndarray:
        return np.sqrt(self.theta2_breaks[:-1])

    @property
    def theta_upper(self) -> np.ndarray:
        return np.sqrt(self.theta2_breaks[1:])

    def _tolerance(self, top: float) -> float:
        return 1e-9 * max(1.0, top)

    def theta2_intervals(self, theta2: np.ndarray) -> np.ndarray:
        """(K, d) mask of the theta^2 intervals containing each value."""
        values = np.asarray(theta2, dtype=float).reshape(-1, 1)
        tol = self._tolerance(self.theta2_max)
        return (values >= self.theta2_breaks[:-1] - tol) & (values <= self.theta2_breaks[1:] + tol)

    def delta_intervals(self, delta: np.ndarray) -> np.ndarray:
        """(K, l) mask of the delta intervals containing each value."""
        values = np.asarray(delta, dtype=float).reshape(-1, 1)
        tol = self._tolerance(self.delta_max)
        return (values >= self.delta_breaks[:-1] - tol) & (values <= self.delta_breaks[1:] + tol)

    def __repr__(self) -> str:
        return (
            f"DiscretizationGrid(d={self.d}, l={self.l}, "
            f"theta2_max={self.theta2_max:.6g}, delta_max={self.delta_max:.6g})"
        )


def build_grid(theta2_max: float, delta_max: float, d: int, l: int) -> DiscretizationGrid:
    """
    Build the theta^2 and delta grids.

    theta^2 breaks are 0, 1 and then d - 1 equal steps up to theta2_max;
    delta breaks are l equal steps from 0 to delta_max. When theta2_max <= 1
    the theta^2 grid collapses to the single interval [0, 1].

    Raises:
        PreconditionError: If d < 2, l < 1 or a maximum is negative
    """
    if d < 2:
        raise PreconditionError(f"d must be at least 2, got {d}")
    if l < 1:
        raise PreconditionError(f"l must be at least 1, got {l}")
    if theta2_max < 0 or delta_max < 0 or not (np.isfinite(theta2_max) and np.isfinite(delta_max)):
        raise PreconditionError(f"grid maxima must be finite and nonnegative, got {theta2_max}, {delta_max}")

    if theta2_max <= 1.0:
        theta2_breaks = np.array([0.0, 1.0])
    else:
        step = (theta2_max - 1.0) / (d - 1)
        theta2_breaks = np.concatenate(([0.0], 1.0 + step * np.arange(d)))
        theta2_breaks[-1] = theta2_max

    delta_breaks = np.arange(l + 1) / l * delta_max
    delta_breaks[-1] = delta_max
    return DiscretizationGrid(theta2_breaks=theta2_breaks, delta_breaks=delta_breaks)
