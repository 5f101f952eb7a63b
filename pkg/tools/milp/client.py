"""
Backend selection.
"""
from typing import Dict, Optional, Protocol

from shared.config.settings import get_settings
from shared.errors import PreconditionError
from shared.logging.logger import setup_logger
from tools.milp.model import MilpModel, MilpOutcome

logger = setup_logger(__name__)

BACKEND_NAMES = ("fallback", "external")


class MilpBackend(Protocol):
    name: str

    def solve(self, model: MilpModel, time_limit: float) -> MilpOutcome: ...


_backends: Dict[str, MilpBackend] = {}


def get_milp_backend(name: Optional[str] = None) -> MilpBackend:
    """
    Get the shared backend instance for a name.

    Args:
        name: "fallback" or "external". If None, uses the configured default.

    Returns:
        Backend instance (one per name per process)
    """
    name = name or get_settings().milp_backend
    if name not in BACKEND_NAMES:
        raise PreconditionError(f"unknown MILP backend {name!r}; expected one of {', '.join(BACKEND_NAMES)}")
    if name not in _backends:
        if name == "fallback":
            from tools.milp.fallback import FallbackBackend
            _backends[name] = FallbackBackend()
        else:
            from tools.milp.pulp_adapter import PulpBackend
            _backends[name] = PulpBackend()
        logger.info(f"MILP backend initialized: {name}")
    return _backends[name]
