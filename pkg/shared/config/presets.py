"""
Solver presets loaded from the cutting-plane config.yaml.
"""
from functools import lru_cache
from pathlib import Path
from typing import Dict, Optional

import yaml
from pydantic import BaseModel, Field

from shared.logging.logger import setup_logger

logger = setup_logger(__name__)

CONFIG_PATH = Path(__file__).resolve().parents[2] / "solvers" / "cutting_plane" / "config.yaml"


class FamilyPreset(BaseModel):
    """Discretization preset for one instance family."""
    d: int = Field(..., ge=2, description="Number of theta-squared intervals")
    l: int = Field(..., ge=1, description="Number of delta intervals")
    svi: bool = Field(default=True, description="Attach supervalid inequalities")


class StoppingConfig(BaseModel):
    """Stopping rule of the cutting-plane loop."""
    tolerance: float
    total_time_limit: float
    rmp_time_limit: float


class SetupConfig(BaseModel):
    """Time limits of the setup phase."""
    bound_time_limit: float
    heuristic_time_limit: float
    heuristic_top_share: float


class SolverPresets(BaseModel):
    """Parsed contents of config.yaml."""
    solver_name: str
    description: Optional[str] = None
    stopping: StoppingConfig
    setup: SetupConfig
    presets: Dict[str, FamilyPreset]

    def for_family(self, family: Optional[str]) -> FamilyPreset:
        """Preset of a family, falling back to the default entry."""
        if family and family in self.presets:
            return self.presets[family]
        return self.presets["default"]


@lru_cache(maxsize=1)
def load_presets(path: Optional[str] = None) -> SolverPresets:
    """
    Load solver presets from YAML.

    Args:
        path: Optional override of the config location

    Returns:
        Validated SolverPresets

    Raises:
        FileNotFoundError: If the config file does not exist
    """
    config_path = Path(path) if path else CONFIG_PATH
    if not config_path.exists():
        raise FileNotFoundError(f"Solver config not found: {config_path}")

    with open(config_path, "r", encoding="utf-8") as f:
        raw = yaml.safe_load(f)

    presets = SolverPresets.model_validate(raw)
    logger.debug(f"Loaded solver presets from {config_path}")
    return presets
