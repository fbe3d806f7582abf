"""
Logging configuration for the command-line tools.
"""

import json
import logging
import logging.config
import os
from datetime import datetime, timezone
from typing import Any, Dict, Optional

from config.settings import get_settings

_RESERVED_ATTRS = frozenset((
    "name", "msg", "args", "levelname", "levelno", "pathname",
    "filename", "module", "lineno", "funcName", "created",
    "msecs", "relativeCreated", "thread", "threadName",
    "processName", "process", "getMessage", "exc_info",
    "exc_text", "stack_info", "taskName",
))


class JSONFormatter(logging.Formatter):
    """Custom JSON formatter for structured logging."""

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as JSON."""
        log_entry = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }

        if record.exc_info:
            log_entry["exception"] = self.formatException(record.exc_info)

        # Extra fields passed through `extra=`
        for key, value in record.__dict__.items():
            if key not in _RESERVED_ATTRS:
                log_entry[key] = value

        return json.dumps(log_entry, default=str)


def setup_logging(level: Optional[str] = None) -> None:
    """
    Setup logging configuration.

    Console output goes to stderr so that command output on stdout stays
    machine-readable.

    Args:
        level: Optional level overriding LOG_LEVEL
    """
    settings = get_settings()
    level = (level or settings.LOG_LEVEL).upper()

    if settings.LOG_FORMAT.lower() == "json":
        formatter: Dict[str, Any] = {"()": JSONFormatter}
    else:
        formatter = {"format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s"}

    handlers: Dict[str, Dict[str, Any]] = {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "default",
            "stream": "ext://sys.stderr",
        }
    }
    if settings.LOG_FILE:
        directory = os.path.dirname(settings.LOG_FILE)
        if directory:
            os.makedirs(directory, exist_ok=True)
        handlers["file"] = {
            "class": "logging.handlers.RotatingFileHandler",
            "formatter": "default",
            "filename": settings.LOG_FILE,
            "maxBytes": 10485760,  # 10MB
            "backupCount": 5,
        }

    logging_config = {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {"default": formatter},
        "handlers": handlers,
        "loggers": {
            "": {  # Root logger
                "level": level,
                "handlers": list(handlers),
                "propagate": False,
            }
        },
    }

    logging.config.dictConfig(logging_config)
