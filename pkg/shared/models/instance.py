"""
Pydantic models for instance files.

Indices are 0-based: i in {0, 1} is the row, j in {0..n-1} the component.
"""
from typing import List, Literal, Optional, Tuple
from pydantic import BaseModel, ConfigDict, Field


class ConstraintDocument(BaseModel):
    """One linear constraint as stored on disk."""
    model_config = ConfigDict(extra="forbid")

    terms: List[Tuple[int, int, float]] = Field(..., description="[i, j, coeff] triples")
    rel: Literal["le", "eq", "ge"]
    rhs: float
    name: Optional[str] = None


class InstanceDocument(BaseModel):
    """Instance file contents."""
    model_config = ConfigDict(extra="forbid")

    n: int = Field(..., ge=1)
    mu: List[float]
    sigma: List[List[float]]
    sense: Literal["max", "min"]
    constraints: List[ConstraintDocument] = Field(default_factory=list)
    label: Optional[str] = None
    family: Optional[str] = None
    param: Optional[float] = None
    seed: Optional[int] = None
