"""Logging setup for the command line."""

import logging
from pathlib import Path

LOG_DIR = Path.home() / ".cache" / "tsac"
LOG_FILE = LOG_DIR / "tsac.log"
LOG_FORMAT = "%(asctime)s [%(levelname)s] %(message)s"


def setup_logging(level: str = "INFO", log_file: Path | None = None) -> Path:
    """
    Send tsac logs to a file. Tail it while a bench runs.

    Args:
        level: Logging level name.
        log_file: Override for the default ~/.cache/tsac/tsac.log

    Returns:
        Path of the log file in use.
    """
    path = log_file or LOG_FILE
    path.parent.mkdir(parents=True, exist_ok=True)

    root = logging.getLogger("tsac")
    root.setLevel(getattr(logging, level.upper(), logging.INFO))

    for handler in list(root.handlers):
        if isinstance(handler, logging.FileHandler):
            root.removeHandler(handler)
            handler.close()

    handler = logging.FileHandler(path, encoding="utf-8")
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)

    root.debug("Logging to %s at %s", path, level)
    return path
