"""structlog setup shared by every subcommand; log lines go to stderr, data files elsewhere."""

import logging
import sys
from typing import Any

import numpy as np
import structlog

from src.core.config import settings

# Arrays longer than this are summarized in log lines instead of dumped
MAX_LOGGED_ARRAY = 8


def _numpy_to_builtin(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        if value.size > MAX_LOGGED_ARRAY:
            return {"shape": list(value.shape), "min": float(value.min()),
                    "max": float(value.max())}
        return value.tolist()
    return value


def _convert_numpy(_: Any, __: str, event_dict: dict[str, Any]) -> dict[str, Any]:
    """numpy scalars and small arrays as plain Python values so JSONRenderer can emit them."""
    return {key: _numpy_to_builtin(value) for key, value in event_dict.items()}


def setup_logging(log_level: str | None = None) -> None:
    level = (log_level or settings.log_level).upper()
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            _convert_numpy,
            structlog.processors.format_exc_info,
            structlog.dev.ConsoleRenderer()
            if sys.stderr.isatty()
            else structlog.processors.JSONRenderer(),
        ],
        wrapper_class=structlog.stdlib.BoundLogger,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )

    logging.basicConfig(format="%(message)s", stream=sys.stderr, force=True)
    logging.getLogger().setLevel(getattr(logging, level))


def bind_run_context(**context: object) -> None:
    """Attach run-wide context (config hash, subcommand) to every subsequent log line."""
    structlog.contextvars.clear_contextvars()
    structlog.contextvars.bind_contextvars(**context)


def get_logger(name: str) -> structlog.stdlib.BoundLogger:
    return structlog.get_logger(f"dnls.{name}")
