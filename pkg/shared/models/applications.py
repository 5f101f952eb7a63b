"""
Pydantic models for the application generators and their check reports.
"""
from typing import List, Literal, Optional
from pydantic import BaseModel, ConfigDict, Field, model_validator

from shared.config.constants import DFS_MIN_SCORE, KNAPSACK_CAPACITY, MAKESPAN_CLUSTERS


class KnapsackSpec(BaseModel):
    """Two-knapsack instance parameters."""
    model_config = ConfigDict(extra="forbid")

    n: int = Field(..., ge=1, description="Number of items")
    alpha: float = Field(..., gt=0, description="Covariance scale factor")
    seed: int = Field(..., ge=0)
    capacity: float = Field(default=KNAPSACK_CAPACITY, gt=0, description="Capacity of both knapsacks")
    sense: Literal["max", "min"] = "max"


class MakespanSpec(BaseModel):
    """Two-machine stochastic makespan instance parameters."""
    model_config = ConfigDict(extra="forbid")

    n: int = Field(..., ge=1, description="Number of jobs")
    eta: float = Field(..., gt=0, description="Variance level")
    seed: int = Field(..., ge=0)
    clusters: Optional[List[int]] = Field(default=None, description="Cluster label per job; drawn when absent")
    correlated: bool = Field(default=True, description="Correlation one within a cluster; False gives a diagonal sigma")

    @model_validator(mode="after")
    def _clusters_match(self) -> "MakespanSpec":
        if self.clusters is not None:
            if len(self.clusters) != self.n:
                raise ValueError(f"expected {self.n} cluster labels, got {len(self.clusters)}")
            unknown = sorted(set(self.clusters) - set(MAKESPAN_CLUSTERS))
            if unknown:
                raise ValueError(f"cluster labels must be in {MAKESPAN_CLUSTERS}, got {unknown}")
        return self


class DfsSpec(BaseModel):
    """Showdown contest: n' players split over two teams."""
    model_config = ConfigDict(extra="forbid")

    n_players: int = Field(..., ge=1)
    team_of: List[Literal[1, 2]] = Field(..., description="Team label per player")
    min_score_filter: float = Field(default=DFS_MIN_SCORE, ge=0)

    @model_validator(mode="after")
    def _teams_valid(self) -> "DfsSpec":
        if len(self.team_of) != self.n_players:
            raise ValueError(f"expected {self.n_players} team labels, got {len(self.team_of)}")
        if set(self.team_of) != {1, 2}:
            raise ValueError("both teams need at least one player")
        return self


class Theorem2Report(BaseModel):
    """Outcome of the uncorrelated makespan equivalence check."""
    n: int
    evaluated: int
    theta: float
    theta_spread: float
    theta_constant: bool
    stochastic_value: float
    stochastic_makespan: float
    deterministic_makespan: float
    argmin_match: bool
    monotone: bool
    passed: bool


class Theorem3Report(BaseModel):
    """Outcome of the 2.005-approximation check."""
    n: int
    l: int
    evaluated: int
    interval_width: float
    max_factor: float
    rmp_value: float
    rmp_selection_value: float
    optimum: float
    rmp_factor: float
    passed: bool
