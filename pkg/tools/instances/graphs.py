"""
Weighted undirected graphs and the edge-list text format.

Each non-comment line is ``u v w`` with 0-based vertices and an integer
weight. Lines starting with ``#`` are ignored, except ``# vertices N``
which fixes the vertex count (isolated vertices otherwise vanish).
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from shared.errors import InstanceFormatError, PreconditionError


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph with integer edge weights."""

    n_vertices: int
    edges: Tuple[Tuple[int, int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(u), int(v), int(w)) for u, v, w in self.edges))
        if self.n_vertices < 1:
            raise PreconditionError("graph needs at least one vertex")
        for u, v, _ in self.edges:
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices) or u == v:
                raise PreconditionError(f"invalid edge ({u}, {v}) for {self.n_vertices} vertices")

    def weight_matrix(self) -> np.ndarray:
        """Symmetric matrix of summed edge weights."""
        weights = np.zeros((self.n_vertices, self.n_vertices))
        for u, v, w in self.edges:
            weights[u, v] += w
            weights[v, u] += w
        return weights

    @property
    def total_abs_weight(self) -> int:
        return sum(abs(w) for _, _, w in self.edges)

    def cut_weight(self, side: np.ndarray) -> float:
        """Weight of edges crossing between side==1 and side==0."""
        side = np.asarray(side).astype(bool)
        return float(sum(w for u, v, w in self.edges if side[u] != side[v]))


def parse_edge_list(text: str, n_vertices: Optional[int] = None) -> WeightedGraph:
    """
    Parse edge-list text.

    Raises:
        InstanceFormatError: On malformed lines
    """
    edges = []
    declared = n_vertices
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            fields = line[1:].split()
            if len(fields) == 2 and fields[0] == "vertices" and declared is None:
                declared = int(fields[1])
            continue
        fields = line.split()
        if len(fields) != 3:
            raise InstanceFormatError("expected 'u v w'", location=f"line {number}")
        try:
            u, v, w = (int(f) for f in fields)
        except ValueError as e:
            raise InstanceFormatError("edge fields must be integers", location=f"line {number}") from e
        edges.append((u, v, w))

    inferred = 1 + max((max(u, v) for u, v, _ in edges), default=0)
    return WeightedGraph(declared if declared is not None else inferred, tuple(edges))


def read_edge_list(path: Union[str, Path], n_vertices: Optional[int] = None) -> WeightedGraph:
    """Read an edge-list file."""
    return parse_edge_list(Path(path).read_text(encoding="utf-8"), n_vertices)


def format_edge_list(graph: WeightedGraph) -> str:
    """Render a graph in edge-list text."""
    lines = [f"# vertices {graph.n_vertices}"]
    lines.extend(f"{u} {v} {w}" for u, v, w in graph.edges)
    return "\n".join(lines) + "\n"


def random_graph(
    n_vertices: int,
    seed: int,
    weight_range: Tuple[int, int] = (-5, 5),
    density: float = 0.5,
) -> WeightedGraph:
    """Random simple graph with integer weights drawn uniformly from weight_range."""
    rng = np.random.default_rng(seed)
    low, high = weight_range
    edges = []
    for u in range(n_vertices):
        for v in range(u + 1, n_vertices):
            if rng.random() < density:
                weight = int(rng.integers(low, high + 1))
                if weight != 0:
                    edges.append((u, v, weight))
    return WeightedGraph(n_vertices, tuple(edges))
