"""
One module per command; each exposes ``register(subparsers)`` and ``run(args) -> int``.
"""
import argparse
import sys

from shared.logging.logger import setup_logger, log_with_context

logger = setup_logger(__name__)


def positive_int(text: str) -> int:
    """argparse type for integers >= 1."""
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def emit(text: str) -> None:
    """Write a report to stdout."""
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    sys.stdout.flush()


def fail(command: str, error: Exception, code: int) -> int:
    """Log a command failure, print a one-line message to stderr and return ``code``."""
    log_with_context(logger, "error", f"{command} failed", command=command,
                     error=str(error), error_type=type(error).__name__)
    print(f"{command}: {error}", file=sys.stderr)
    return code
