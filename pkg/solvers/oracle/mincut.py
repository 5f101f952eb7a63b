"""
Minimum weighted cut by enumeration, and the reduction of min-cut to an
expected-maximum instance.

For the reduction every component is standard normal with
cov(Y_j, Y_k) = w_jk / (4M + 1), M the total absolute edge weight, and the
region is unconstrained. An optimal selection puts every vertex in exactly
one row, and the first row is one side of a minimum cut.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from shared.config.constants import MAX_MINCUT_VERTICES
from shared.errors import PreconditionError
from tools.gaussian.types import GaussianVector, SelectionPair
from tools.instances.graphs import WeightedGraph
from tools.instances.problem import ProblemInstance, Sense
from tools.instances.region import FeasibleRegion


@dataclass(frozen=True)
class MinCutResult:
    """
    Minimum cuts under both conventions.

    ``side``/``weight`` range over every 2-partition, an empty side
    included; ``nontrivial_side``/``nontrivial_weight`` require both sides
    nonempty and are None for a single vertex.
    """
    side: np.ndarray
    weight: float
    nontrivial_side: Optional[np.ndarray]
    nontrivial_weight: Optional[float]


def _all_sides(n_vertices: int) -> np.ndarray:
    """Every side vector with vertex 0 on side 0, as a (2^(n-1), n) int8 array."""
    codes = np.arange(2 ** (n_vertices - 1), dtype=np.int64)
    bits = (codes[:, None] >> np.arange(n_vertices - 1)) & 1
    return np.hstack([np.zeros((codes.size, 1), dtype=np.int8), bits.astype(np.int8)])


def min_cut_brute_force(graph: WeightedGraph) -> MinCutResult:
    """
    Enumerate the 2-partitions of the vertices.

    Raises:
        PreconditionError: If the graph has more than 20 vertices
    """
    if graph.n_vertices > MAX_MINCUT_VERTICES:
        raise PreconditionError(
            f"min-cut enumeration supports at most {MAX_MINCUT_VERTICES} vertices, got {graph.n_vertices}"
        )
    sides = _all_sides(graph.n_vertices)
    weights = np.zeros(sides.shape[0])
    for u, v, w in graph.edges:
        weights += w * (sides[:, u] != sides[:, v])

    best = int(np.argmin(weights))
    nontrivial_side, nontrivial_weight = None, None
    if sides.shape[0] > 1:
        # Row 0 is the all-zero side vector, the only trivial partition
        k = 1 + int(np.argmin(weights[1:]))
        nontrivial_side, nontrivial_weight = sides[k].copy(), float(weights[k])
    return MinCutResult(sides[best].copy(), float(weights[best]), nontrivial_side, nontrivial_weight)


def build_mincut_reduction(graph: WeightedGraph) -> ProblemInstance:
    """Maximization instance whose optimum induces a minimum cut of ``graph``."""
    scale = 4 * graph.total_abs_weight + 1
    sigma = np.eye(graph.n_vertices) + graph.weight_matrix() / scale
    np.fill_diagonal(sigma, 1.0)
    return ProblemInstance(
        gaussian=GaussianVector(np.zeros(graph.n_vertices), sigma),
        region=FeasibleRegion(graph.n_vertices),
        sense=Sense.MAXIMIZE,
        label=f"mincut_{graph.n_vertices}v_{len(graph.edges)}e",
        family="mincut",
    )


def reduction_cut_weight(graph: WeightedGraph, x: SelectionPair) -> float:
    """Cut weight of the partition induced by the first row of x."""
    if x.n != graph.n_vertices:
        raise PreconditionError(f"selection has n={x.n}, graph has {graph.n_vertices} vertices")
    return graph.cut_weight(x.x[0])
