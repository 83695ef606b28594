"""
Logging for the numeric modules and the command line.

Library modules only ever call logging.getLogger(__name__); handlers are
installed once, by the CLI, through setup_logging().
"""

import logging
import sys
from pathlib import Path
from typing import Optional

DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DEBUG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(filename)s:%(lineno)d - %(message)s"


def resolve_level(quiet: bool = False, verbose: bool = False, default: str = "INFO") -> str:
    """--quiet and --verbose win over the configured level"""
    if quiet:
        return "WARNING"
    if verbose:
        return "DEBUG"
    return default.upper()


def setup_logging(
    level: str = "INFO",
    format_string: Optional[str] = None,
    log_file: Optional[str] = None,
    capture_warnings: bool = True,
) -> None:
    """
    Configure the root logger for a command line run.

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        format_string: Custom format; DEBUG runs add file and line numbers
        log_file: Optional file that receives the same records as stderr
        capture_warnings: Route numpy RuntimeWarnings through the "py.warnings" logger
    """
    level = level.upper()
    if level not in logging.getLevelNamesMapping():
        raise ValueError(f"Unknown log level {level!r}")
    if format_string is None:
        format_string = DEBUG_FORMAT if level == "DEBUG" else DEFAULT_FORMAT
    formatter = logging.Formatter(format_string)

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    root_logger.handlers.clear()

    # stderr keeps stdout free for command summaries
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_path)
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)

    logging.captureWarnings(capture_warnings)
