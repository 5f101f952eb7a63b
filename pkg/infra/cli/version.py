"""
Version string embedded in result records.
"""
import subprocess
from functools import lru_cache
from pathlib import Path

from shared.config.constants import PACKAGE_VERSION
from shared.logging.logger import setup_logger

logger = setup_logger(__name__)

_REPO_ROOT = Path(__file__).resolve().parents[2]


@lru_cache(maxsize=1)
def get_version() -> str:
    """`git describe --always --dirty` of the checkout, else the package version."""
    try:
        completed = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=_REPO_ROOT,
            capture_output=True,
            text=True,
            timeout=5,
            check=True,
        )
    except (OSError, subprocess.SubprocessError) as e:
        logger.debug(f"git describe unavailable: {e}")
        return PACKAGE_VERSION
    described = completed.stdout.strip()
    return described or PACKAGE_VERSION
