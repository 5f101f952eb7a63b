"""
gaussmax command-line interface.

Usage:
    python -m infra.cli generate kp --n 15 --alpha 50 --seed 1 --out instances/
    python -m infra.cli solve instances/kp_n15_a50_s1.json --output result.json
    python -m infra.cli verify mincut --vertices 6 --graphs 20
    python -m infra.cli bench instances/ --models enhanced,baseline --workers 4

Exit codes:
    0  success (solve: optimal or gap_limit)
    1  verify failure, bench without a completed instance, solver error
    2  usage error, unreadable input, empty directory
    3  solve stopped at the time limit
    4  solve found the instance infeasible
"""
import argparse
from typing import List, Optional

from infra.cli.commands import bench, generate, solve, verify
from shared.config.constants import EXIT_USAGE, PACKAGE_NAME, PACKAGE_VERSION
from shared.config.settings import get_settings
from shared.logging.logger import set_log_level

COMMANDS = (generate, solve, verify, bench)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PACKAGE_NAME,
        description="Optimize the expected maximum of two Gaussian selections",
    )
    parser.add_argument("--version", action="version", version=f"{PACKAGE_NAME} {PACKAGE_VERSION}")
    parser.add_argument("--log-level", default=None, help="Override LOG_LEVEL (DEBUG, INFO, WARNING, ERROR)")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments and dispatch; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    set_log_level(args.log_level or get_settings().log_level)
    return args.handler(args)
