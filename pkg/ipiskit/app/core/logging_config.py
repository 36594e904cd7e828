"""Logging setup shared by the CLI and the stub server."""

import logging
import sys

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"


def configure_logging(level: str = "INFO") -> None:
    """
    Route toolkit logs to stderr at the given level.

    stdout is left to command output (expansions, rewritten text, bundles).

    Args:
        level: One of DEBUG, INFO, WARNING, ERROR, CRITICAL
    """
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(level.upper())
