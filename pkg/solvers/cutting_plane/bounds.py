"""
Bounding functions of E[max(Z1, Z2)] built from interval bounds on theta and delta.

Upper bounds drive the maximization RMPs, lower bounds the minimization
mirror. ``interval_bound`` evaluates the function an RMP optimizes for a
fixed selection, taking the grid intervals that contain (theta^2, delta).
"""
import math
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from shared.config.constants import INV_SQRT_2EPI, INV_SQRT_2PI
from shared.errors import PreconditionError
from solvers.cutting_plane.grid import DiscretizationGrid
from tools.gaussian.normal import cdf_of_ratio, cdf_of_ratio_array, phi_term, phi_term_array
from tools.gaussian.types import PairMoments
from tools.instances.problem import Sense

_ORDER_TOLERANCE = 1e-9


class BoundKind(str, Enum):
    """RMP flavour."""
    BASELINE = "baseline"
    ENHANCED = "enhanced"


def _check_order(low: float, value: float, high: float, label: str) -> None:
    scale = _ORDER_TOLERANCE * max(1.0, abs(value))
    if low < -scale or low > value + scale or value > high + scale:
        raise PreconditionError(f"{label} bounds must satisfy 0 <= lower <= value <= upper, got {low}, {value}, {high}")


def baseline_bound(m: PairMoments, u_theta: float) -> float:
    """e1 + u_theta / sqrt(2 pi)."""
    _check_order(0.0, m.theta, u_theta, "theta")
    return m.e1 + u_theta * INV_SQRT_2PI


def baseline_lower_bound(m: PairMoments, l_theta: float, u_delta: float) -> float:
    """(e1 + e2) / 2 + l_theta * phi(u_delta / l_theta), a lower bound of E[max]."""
    _check_order(l_theta, m.theta, math.inf, "theta")
    _check_order(0.0, m.delta, u_delta, "delta")
    return 0.5 * (m.e1 + m.e2) + phi_term(l_theta, u_delta)


def enhanced_bound(m: PairMoments, l_theta: float, u_theta: float, l_delta: float, u_delta: float) -> float:
    """
    Upper bound of E[max] from interval bounds on theta and delta.

    Args:
        m: Pair moments
        l_theta, u_theta: Bounds with 0 <= l_theta <= theta <= u_theta
        l_delta, u_delta: Bounds with 0 <= l_delta <= delta <= u_delta

    Returns:
        e1 Phi(u_delta/l_theta) + e2 (1 - Phi(u_delta/l_theta)) + u_theta phi(l_delta/u_theta)
    """
    _check_order(l_theta, m.theta, u_theta, "theta")
    _check_order(l_delta, m.delta, u_delta, "delta")
    p = cdf_of_ratio(u_delta, l_theta)
    return m.e1 * p + m.e2 * (1.0 - p) + phi_term(u_theta, l_delta)


def enhanced_lower_bound(m: PairMoments, l_theta: float, u_theta: float, l_delta: float, u_delta: float) -> float:
    """
    Lower bound of E[max]: endpoints swap roles relative to enhanced_bound.

    Returns:
        e1 Phi(l_delta/u_theta) + e2 (1 - Phi(l_delta/u_theta)) + l_theta phi(u_delta/l_theta)
    """
    _check_order(l_theta, m.theta, u_theta, "theta")
    _check_order(l_delta, m.delta, u_delta, "delta")
    p = cdf_of_ratio(l_delta, u_theta)
    return m.e1 * p + m.e2 * (1.0 - p) + phi_term(l_theta, u_delta)


def delta_gap_bound(m: PairMoments, l_theta: float, u_theta: float, l_delta: float, u_delta: float) -> float:
    """
    Bound on enhanced_bound - expected_max.

    (delta / sqrt(2 pi) + u_theta / sqrt(2 e pi)) * (u_delta/l_theta - l_delta/u_theta)
    + (u_theta - theta) / sqrt(2 pi). With u_theta = theta the last term
    vanishes and the first factor uses theta.

    Returns +inf when l_theta is 0.
    """
    _check_order(l_theta, m.theta, u_theta, "theta")
    _check_order(l_delta, m.delta, u_delta, "delta")
    if l_theta <= 0:
        return math.inf
    ratio_spread = u_delta / l_theta - l_delta / u_theta
    return (m.delta * INV_SQRT_2PI + u_theta * INV_SQRT_2EPI) * ratio_spread + (u_theta - m.theta) * INV_SQRT_2PI


# Grid-evaluated bounds

def pair_tables(grid: DiscretizationGrid, sense: Sense):
    """
    Coefficients of the enhanced RMP per (theta interval q, delta interval h).

    Returns:
        (weights, spreads): weights[q, h] multiplies u1 (1 - weights multiplies
        u2); spreads[q, h] is the theta * phi term
    """
    theta_lower = grid.theta_lower[:, None]
    theta_upper = grid.theta_upper[:, None]
    delta_lower = grid.delta_breaks[None, :-1]
    delta_upper = grid.delta_breaks[None, 1:]
    if sense.is_max:
        weights = cdf_of_ratio_array(delta_upper, theta_lower)
        spreads = phi_term_array(theta_upper, delta_lower)
    else:
        weights = cdf_of_ratio_array(delta_lower, theta_upper)
        spreads = phi_term_array(theta_lower, delta_upper)
    return weights, spreads


def baseline_coefficients(grid: DiscretizationGrid, sense: Sense) -> np.ndarray:
    """Per-theta-interval constant the baseline RMP adds to its objective."""
    if sense.is_max:
        return grid.theta_upper * INV_SQRT_2PI
    return phi_term_array(grid.theta_lower, grid.delta_max)


def evaluate_intervals(
    e1: np.ndarray,
    e2: np.ndarray,
    theta2: np.ndarray,
    delta: np.ndarray,
    grid: DiscretizationGrid,
    sense: Sense,
    kind: BoundKind,
    theta_floors: Optional[Sequence[float]] = None,
):
    """
    Vectorized bounding function over admissible grid intervals.

    Args:
        e1, e2: Row means in RMP order (e1 >= e2)
        theta2: theta^2 values
        delta: e1 - e2
        grid: Discretization grid
        sense: Maximize takes the largest admissible value, minimize the smallest
        kind: Baseline or enhanced
        theta_floors: Optional per-delta-interval theta floors (enhanced only)

    Returns:
        (values, q_index, h_index); values are NaN and indices -1 where no
        interval pair is admissible. h_index is -1 for the baseline kind.
    """
    e1, e2 = np.asarray(e1, dtype=float), np.asarray(e2, dtype=float)
    theta2 = np.asarray(theta2, dtype=float)
    q_mask = grid.theta2_intervals(theta2)
    worst = -np.inf if sense.is_max else np.inf
    pick = np.argmax if sense.is_max else np.argmin
    count = e1.shape[0]

    if kind is BoundKind.BASELINE:
        constant = baseline_coefficients(grid, sense)
        base = e1 if sense.is_max else 0.5 * (e1 + e2)
        table = np.where(q_mask, base[:, None] + constant[None, :], worst)
        q_best = pick(table, axis=1)
        values = table[np.arange(count), q_best]
        ok = q_mask.any(axis=1)
        return np.where(ok, values, np.nan), np.where(ok, q_best, -1), np.full(count, -1)

    h_mask = grid.delta_intervals(delta)
    if theta_floors is not None:
        floors = np.asarray(theta_floors, dtype=float)
        finite = np.isfinite(floors)
        floor2 = np.where(finite, floors, 0.0) ** 2
        tol = 1e-9 * max(1.0, grid.theta2_max)
        h_mask = h_mask & finite[None, :] & (theta2[:, None] >= floor2[None, :] - tol)

    weights, spreads = pair_tables(grid, sense)
    values = (
        e1[:, None, None] * weights[None]
        + e2[:, None, None] * (1.0 - weights[None])
        + spreads[None]
    )
    admissible = q_mask[:, :, None] & h_mask[:, None, :]
    flat = np.where(admissible, values, worst).reshape(count, -1)
    best = pick(flat, axis=1)
    chosen = flat[np.arange(count), best]
    ok = admissible.reshape(count, -1).any(axis=1)
    q_best, h_best = np.divmod(best, grid.l)
    return (
        np.where(ok, chosen, np.nan),
        np.where(ok, q_best, -1),
        np.where(ok, h_best, -1),
    )


def interval_bound(
    m: PairMoments,
    grid: DiscretizationGrid,
    sense: Sense = Sense.MAXIMIZE,
    kind: BoundKind = BoundKind.ENHANCED,
    theta_floors: Optional[Sequence[float]] = None,
) -> float:
    """
    The bounding function g(x) an RMP assigns to a selection with moments m.

    Returns NaN when (theta^2, delta) lies outside the grid.
    """
    values, _, _ = evaluate_intervals(
        np.array([m.e1]),
        np.array([m.e2]),
        np.array([m.theta2]),
        np.array([m.delta]),
        grid,
        Sense(sense),
        BoundKind(kind),
        theta_floors,
    )
    return float(values[0])
