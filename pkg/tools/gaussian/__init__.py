"""
Gaussian moment algebra for pairs of linear selections.

Provides:
- GaussianVector, SelectionPair, PairMoments value types
- Standard normal pdf/cdf with the Phi(a/0) convention
- pair_moments, expected_max, expected_min and batch evaluators
- nearest_psd repair and spectral sampling
"""
from tools.gaussian.types import GaussianVector, SelectionPair, PairMoments
from tools.gaussian.normal import (
    std_normal_pdf,
    std_normal_cdf,
    cdf_of_ratio,
    phi_term,
)
from tools.gaussian.moments import (
    pair_moments,
    expected_max,
    expected_min,
    MomentsBatch,
    batch_pair_moments,
    batch_expected_max,
)
from tools.gaussian.psd import nearest_psd
from tools.gaussian.sampling import sample

__all__ = [
    "GaussianVector",
    "SelectionPair",
    "PairMoments",
    "std_normal_pdf",
    "std_normal_cdf",
    "cdf_of_ratio",
    "phi_term",
    "pair_moments",
    "expected_max",
    "expected_min",
    "MomentsBatch",
    "batch_pair_moments",
    "batch_expected_max",
    "nearest_psd",
    "sample",
]
