"""
Problem instances: a Gaussian vector, a feasible region and a sense.
"""
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

from shared.errors import DimensionMismatchError
from tools.gaussian.types import GaussianVector
from tools.instances.region import FeasibleRegion


class Sense(str, Enum):
    """Optimization direction of E[max(Z1, Z2)]."""
    MAXIMIZE = "max"
    MINIMIZE = "min"

    @property
    def is_max(self) -> bool:
        return self is Sense.MAXIMIZE


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """An instance of max/min E[max(Z1(x), Z2(x))] over x in Omega."""

    gaussian: GaussianVector
    region: FeasibleRegion
    sense: Sense = Sense.MAXIMIZE
    label: str = ""
    family: Optional[str] = None
    param: Optional[float] = None
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "sense", Sense(self.sense))
        if self.gaussian.n != self.region.n:
            raise DimensionMismatchError(
                f"gaussian vector has n={self.gaussian.n}, region has n={self.region.n}"
            )

    @property
    def n(self) -> int:
        return self.gaussian.n

    def with_sense(self, sense: Sense) -> "ProblemInstance":
        return replace(self, sense=Sense(sense))

    def with_region(self, region: FeasibleRegion) -> "ProblemInstance":
        return replace(self, region=region)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProblemInstance):
            return NotImplemented
        return (
            self.gaussian == other.gaussian
            and self.region == other.region
            and self.sense is other.sense
            and self.label == other.label
            and self.family == other.family
            and self.param == other.param
            and self.seed == other.seed
        )

    __hash__ = None
