"""
Sampling from a GaussianVector through a spectral factorization.
"""
import numpy as np

from shared.config.constants import PSD_TOLERANCE
from shared.errors import CovarianceError, PreconditionError
from tools.gaussian.types import GaussianVector


def spectral_factor(sigma: np.ndarray) -> np.ndarray:
    """
    L with L @ L.T == sigma, valid for singular PSD matrices.

    Raises:
        CovarianceError: If sigma has an eigenvalue below the PSD tolerance
    """
    eigenvalues, eigenvectors = np.linalg.eigh(sigma)
    floor = -PSD_TOLERANCE * max(float(np.diag(sigma).max()), 0.0)
    if eigenvalues.min() < floor:
        raise CovarianceError(f"cannot factor a non-PSD matrix (eigenvalue {eigenvalues.min():.3e})")
    return eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))


def sample(g: GaussianVector, count: int, seed: int) -> np.ndarray:
    """
    Draw i.i.d. samples of the component vector.

    Args:
        g: Gaussian vector
        count: Number of draws
        seed: Seed of the PCG64 generator

    Returns:
        (count, n) array of samples
    """
    if count <= 0:
        raise PreconditionError(f"count must be positive, got {count}")
    rng = np.random.default_rng(seed)
    factor = spectral_factor(g.sigma)
    normals = rng.standard_normal((count, g.n))
    return g.mu + normals @ factor.T
