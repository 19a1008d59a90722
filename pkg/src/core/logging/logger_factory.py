import json
import sys
from datetime import timezone
from typing import Optional

from loguru import logger as _logger

from src.core.config import get_settings

_TEXT_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | <level>{level: <8}</level> | "
    "<cyan>{extra[name]}</cyan> - <level>{message}</level>"
)

_configured = False


def _json_sink(message) -> None:
    record = message.record
    extra = dict(record["extra"])
    log_record = {
        "timestamp": record["time"].astimezone(timezone.utc).isoformat().replace("+00:00", "Z"),
        "level": record["level"].name,
        "name": extra.pop("name", record["name"]),
        "message": record["message"],
    }
    log_record.update(extra)
    sys.stderr.write(json.dumps(log_record, default=str) + "\n")


def configure_logging(level: Optional[str] = None, fmt: Optional[str] = None) -> None:
    """Install the single stderr sink; later calls replace it."""
    global _configured
    try:
        settings = get_settings()
        default_level, default_fmt = settings.LOG_LEVEL, settings.LOG_FORMAT
    except ValueError:
        # a malformed environment is reported by the entry point
        default_level, default_fmt = "INFO", "text"
    level = (level or default_level).upper()
    fmt = (fmt or default_fmt).lower()

    _logger.remove()
    _logger.configure(extra={"name": "sem"})
    if fmt == "json":
        _logger.add(_json_sink, level=level)
    else:
        _logger.add(sys.stderr, level=level, format=_TEXT_FORMAT)
    _configured = True


def get_logger(name: str):
    if not _configured:
        configure_logging()
    return _logger.bind(name=name)
