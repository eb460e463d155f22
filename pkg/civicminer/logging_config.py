# logging_config.py

"""Central logging configuration for the miner.

Usage::

    from civicminer.logging_config import setup_logging
    setup_logging()

Call *setup_logging()* **once**, at the top of the CLI entry point, so every
module logger (``logging.getLogger(__name__)``) inherits the same handlers.
Console logs go to stderr because stdout may carry a rule file; a rotating JSON
file (``<LOG_DIR>/civicminer.log``) is added when a log directory is set.
"""

from __future__ import annotations

import logging
import logging.config
from pathlib import Path
from typing import Optional

from .config import settings


def setup_logging(
    level: Optional[str] = None,
    log_dir: Optional[str] = None,
    json_console: Optional[bool] = None,
) -> None:
    """Configure the root logger; arguments override the environment settings."""

    log_level = (level or settings.LOG_LEVEL).upper()
    log_dir = log_dir if log_dir is not None else settings.LOG_DIR
    json_console = settings.LOG_JSON if json_console is None else json_console

    logging_config: dict = {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "json": {
                "()": "pythonjsonlogger.jsonlogger.JsonFormatter",
                "format": "%(asctime)s %(levelname)s %(name)s %(message)s",
                "datefmt": "%Y-%m-%d %H:%M:%S",
            },
            "console": {
                "format": "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s",
                "datefmt": "%Y-%m-%d %H:%M:%S",
            },
        },
        "handlers": {
            "console": {
                "class": "logging.StreamHandler",
                "formatter": "json" if json_console else "console",
                "stream": "ext://sys.stderr",
            },
        },
        "root": {
            "level": log_level,
            "handlers": ["console"],
        },
    }

    if log_dir:
        directory = Path(log_dir)
        directory.mkdir(parents=True, exist_ok=True)
        logging_config["handlers"]["file"] = {
            "class": "logging.handlers.RotatingFileHandler",
            "formatter": "json",
            "filename": str(directory / "civicminer.log"),
            "maxBytes": 5 * 1024 * 1024,  # 5 MB
            "backupCount": 1,
            "encoding": "utf-8",
        }
        logging_config["root"]["handlers"].append("file")

    logging.config.dictConfig(logging_config)

    # pandas / openpyxl chatter is noise outside debug runs
    if log_level not in ("DEBUG", "NOTSET"):
        for noisy in ("openpyxl", "numexpr"):
            logging.getLogger(noisy).setLevel("WARNING")
