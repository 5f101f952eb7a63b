"""
Positive semidefinite repair of covariance estimates.
"""
import numpy as np

from shared.errors import CovarianceError, DimensionMismatchError

SYMMETRY_TOLERANCE = 1e-12


def nearest_psd(sigma: np.ndarray) -> np.ndarray:
    """
    Clip negative eigenvalues of a symmetric matrix to zero.

    Args:
        sigma: Square symmetric matrix

    Returns:
        Symmetric PSD matrix. A PSD input is returned unchanged (as a copy).

    Raises:
        CovarianceError: If the input is not symmetric
    """
    matrix = np.array(sigma, dtype=float, copy=True)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {matrix.shape}")

    scale = max(1.0, float(np.abs(matrix).max())) if matrix.size else 1.0
    if np.abs(matrix - matrix.T).max(initial=0.0) > SYMMETRY_TOLERANCE * scale:
        raise CovarianceError("nearest_psd requires a symmetric matrix")

    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    if eigenvalues.size == 0 or eigenvalues.min() >= 0:
        return matrix

    clipped = np.clip(eigenvalues, 0.0, None)
    repaired = (eigenvectors * clipped) @ eigenvectors.T
    return 0.5 * (repaired + repaired.T)
