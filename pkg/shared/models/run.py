"""
Pydantic models for solver configuration and result records.
"""
from typing import Any, Dict, List, Literal, Optional
from pydantic import BaseModel, ConfigDict, Field, model_validator

from shared.config.constants import (
    DEFAULT_BOUND_TIME_LIMIT,
    DEFAULT_HEURISTIC_TIME_LIMIT,
    DEFAULT_RMP_TIME_LIMIT,
    DEFAULT_TOLERANCE,
    DEFAULT_TOTAL_TIME_LIMIT,
    HEURISTIC_TOP_SHARE,
)


class SolverConfig(BaseModel):
    """Parameters of one cutting-plane solve."""
    model_config = ConfigDict(extra="forbid")

    d: int = Field(default=25, ge=2, description="Number of theta-squared intervals")
    l: int = Field(default=15, ge=1, description="Number of delta intervals")
    tolerance: float = Field(default=DEFAULT_TOLERANCE, gt=0)
    gap_limit: Optional[float] = Field(default=None, gt=0, description="Looser stopping gap reported as gap_limit")
    rmp_time_limit: float = Field(default=DEFAULT_RMP_TIME_LIMIT, gt=0)
    bound_time_limit: float = Field(default=DEFAULT_BOUND_TIME_LIMIT, gt=0)
    heuristic_time_limit: float = Field(default=DEFAULT_HEURISTIC_TIME_LIMIT, gt=0)
    total_time_limit: float = Field(default=DEFAULT_TOTAL_TIME_LIMIT, gt=0)
    heuristic_top_share: float = Field(default=HEURISTIC_TOP_SHARE, gt=0, le=1)
    backend: Literal["fallback", "external"] = "fallback"
    model: Literal["enhanced", "baseline"] = "enhanced"
    svi: bool = True
    heuristic: bool = True

    @model_validator(mode="after")
    def _gap_limit_looser(self) -> "SolverConfig":
        if self.gap_limit is not None and self.gap_limit < self.tolerance:
            raise ValueError("gap_limit must not be tighter than tolerance")
        return self


class RunConfig(SolverConfig):
    """A CLI run: solver parameters plus the command context."""
    command: str
    instances: List[str] = Field(default_factory=list)
    sense_override: Optional[Literal["max", "min"]] = None
    seed: Optional[int] = None
    output: Optional[str] = None


class TraceRecord(BaseModel):
    """One RMP solve of the cutting-plane loop."""
    iteration: int
    lb: Optional[float]
    ub: Optional[float]
    raw_bound: Optional[float]
    objective: Optional[float] = None
    selection: Optional[str] = None
    wall_time: float


class SolveRecord(BaseModel):
    """Result file written by the solve command."""
    version: str
    instance: str
    label: Optional[str] = None
    family: Optional[str] = None
    sense: Literal["max", "min"]
    status: Literal["optimal", "gap_limit", "time_limit", "infeasible"]
    objective: Optional[float] = None
    incumbent: Optional[List[List[int]]] = None
    lb: Optional[float] = None
    ub: Optional[float] = None
    gap: Optional[float] = None
    iterations: int
    cuts_added: int
    wall_time: float
    setup: Dict[str, Any] = Field(default_factory=dict)
    config: Dict[str, Any]
    trace: List[TraceRecord] = Field(default_factory=list)


class SuiteReport(BaseModel):
    """Machine-readable summary of a verify suite."""
    suite: str
    passed: bool
    checks: int
    failures: List[str] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)


class BenchmarkRow(BaseModel):
    """One solve of the benchmark harness."""
    instance: str
    family: Optional[str] = None
    n: int
    param: Optional[float] = None
    seed: Optional[int] = None
    status: str
    time_s: Optional[float] = None
    lb: Optional[float] = None
    ub: Optional[float] = None
    gap_pct: Optional[float] = None
    iterations: int = 0
    cuts: int = 0
    model: Literal["enhanced", "baseline"]
    error: Optional[str] = None


class BenchmarkSummaryRow(BaseModel):
    """Aggregate over the instances of one (family, n, param, model) group."""
    family: Optional[str] = None
    n: int
    param: Optional[float] = None
    model: str
    instances: int
    solved: int
    avg_time_s: Optional[float] = None
    avg_gap_pct: Optional[float] = None
    avg_cuts: Optional[float] = None
