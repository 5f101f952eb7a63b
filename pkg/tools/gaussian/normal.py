"""
Standard normal density and distribution helpers.

Scalar functions return Python floats; the ``*_array`` variants broadcast
over numpy arrays and are used by the batch evaluators.
"""
import math
from typing import Union

import numpy as np
from scipy.special import ndtr

from shared.config.constants import INV_SQRT_2PI

ArrayLike = Union[float, np.ndarray]


def std_normal_pdf(w: float) -> float:
    """Standard normal density phi(w)."""
    return INV_SQRT_2PI * math.exp(-0.5 * w * w)


def std_normal_cdf(w: float) -> float:
    """
    Standard normal distribution function Phi(w).

    ``scipy.special.ndtr`` evaluates Phi through erf/erfc with double
    precision accuracy in both tails.
    """
    return float(ndtr(w))


def cdf_of_ratio(a: float, t: float) -> float:
    """
    Phi(a / t) with the convention used at t = 0.

    Args:
        a: Numerator
        t: Nonnegative denominator

    Returns:
        Phi(a/t) for t > 0, otherwise 0, 0.5 or 1 by the sign of a
    """
    if t > 0:
        return std_normal_cdf(a / t)
    if a < 0:
        return 0.0
    if a == 0:
        return 0.5
    return 1.0


def phi_term(theta: float, a: float) -> float:
    """theta * phi(a / theta), defined as 0 when theta = 0."""
    if theta <= 0:
        return 0.0
    return theta * std_normal_pdf(a / theta)


def std_normal_pdf_array(w: ArrayLike) -> np.ndarray:
    """Vectorized phi."""
    w = np.asarray(w, dtype=float)
    return INV_SQRT_2PI * np.exp(-0.5 * w * w)


def cdf_of_ratio_array(a: ArrayLike, t: ArrayLike) -> np.ndarray:
    """Vectorized cdf_of_ratio."""
    a, t = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(t, dtype=float))
    positive = t > 0
    safe_t = np.where(positive, t, 1.0)
    limit = np.where(a < 0, 0.0, np.where(a == 0, 0.5, 1.0))
    return np.where(positive, ndtr(a / safe_t), limit)


def phi_term_array(theta: ArrayLike, a: ArrayLike) -> np.ndarray:
    """Vectorized phi_term."""
    theta, a = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(a, dtype=float))
    positive = theta > 0
    safe_theta = np.where(positive, theta, 1.0)
    return np.where(positive, theta * std_normal_pdf_array(a / safe_theta), 0.0)
