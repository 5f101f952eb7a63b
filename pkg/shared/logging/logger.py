"""
Structured logging configuration for the application.

Every record is one JSON object on stderr. Solver code attaches numeric
context (bounds, gaps, timings) through ``log_with_context``; numpy scalars
and arrays in that context are converted to plain JSON values.
"""
import logging
import sys
import json
from datetime import datetime, timezone
from typing import Any, Dict

import numpy as np

from shared.config.settings import get_settings

_configured_loggers: Dict[str, logging.Logger] = {}


def _json_default(value: Any) -> Any:
    """Convert numpy values and other leftovers for json.dumps."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return str(value)


class StructuredFormatter(logging.Formatter):
    """JSON formatter for structured logging."""

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as JSON."""
        log_data: Dict[str, Any] = {
            "timestamp": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }

        # Add exception info if present
        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        # Add extra fields
        if hasattr(record, "extra_fields"):
            log_data.update(record.extra_fields)

        return json.dumps(log_data, default=_json_default)


def setup_logger(name: str) -> logging.Logger:
    """
    Set up a logger with structured JSON output on stderr.

    Args:
        name: Logger name (typically __name__)

    Returns:
        Configured logger instance
    """
    settings = get_settings()
    logger = logging.getLogger(name)

    # Set level from config
    log_level = getattr(logging, settings.log_level.upper(), logging.INFO)
    logger.setLevel(log_level)

    # Avoid duplicate handlers
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(StructuredFormatter())
        logger.addHandler(handler)

    _configured_loggers[name] = logger
    return logger


def set_log_level(level: str) -> None:
    """
    Override the level of every logger created through setup_logger.

    Args:
        level: Level name (DEBUG, INFO, WARNING, ERROR)
    """
    numeric = getattr(logging, level.upper(), logging.INFO)
    for logger in _configured_loggers.values():
        logger.setLevel(numeric)


def log_with_context(logger: logging.Logger, level: str, message: str, **context: Any) -> None:
    """
    Log a message with additional context fields.

    Args:
        logger: Logger instance
        level: Log level (debug, info, warning, error, critical)
        message: Log message
        **context: Additional context fields to include
    """
    log_method = getattr(logger, level.lower(), logger.info)

    # Create a LogRecord with extra fields
    extra = {"extra_fields": context}
    log_method(message, extra=extra)
