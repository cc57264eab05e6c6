"""Logging configuration utilities."""

import logging
import sys
from pathlib import Path
from typing import Any

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
RUN_LOG_FORMAT = "%(asctime)s - [{command}] %(name)s - %(levelname)s - %(message)s"


def setup_logging(config: dict[str, Any], command: str | None = None) -> None:
    """Setup logging for one egnas run.

    Handlers installed by an earlier call are closed first, so repeated runs in
    one process (tests, notebooks) do not duplicate output.

    Args:
        config: Configuration dictionary with logging settings; ``file: null``
            disables the log file
        command: Subcommand name stamped on every record, when given
    """
    log_config = config.get("logging", {})
    level = getattr(logging, log_config.get("level", "INFO").upper())
    log_file = log_config.get("file", "logs/egnas.log")

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    for handler in root_logger.handlers:
        handler.close()
    root_logger.handlers = []

    fmt = RUN_LOG_FORMAT.format(command=command) if command else LOG_FORMAT
    formatter = logging.Formatter(fmt, datefmt="%Y-%m-%d %H:%M:%S")

    handlers: list[logging.Handler] = []
    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_path))
    if log_config.get("console", True):
        handlers.append(logging.StreamHandler(sys.stdout))

    for handler in handlers:
        handler.setLevel(level)
        handler.setFormatter(formatter)
        root_logger.addHandler(handler)

    # numpy RuntimeWarnings (overflow, invalid value) go to the same handlers
    logging.captureWarnings(True)

    logging.info(f"Logging configured at {logging.getLevelName(level)}")
