"""Exit-code mapping for converting toolkit exceptions into process exit statuses."""

import click

from ipiskit.app.core.exceptions import (
    GenreProfileError,
    IpisKitException,
    StrategyNotAllowedError,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def exit_code_for(exc: BaseException) -> int:
    """
    Map an exception raised by a command to the exit code the CLI reports.

    Args:
        exc: The exception that was raised

    Returns:
        2 for usage errors, 1 for I/O and validation errors
    """
    if isinstance(exc, (StrategyNotAllowedError, GenreProfileError, click.UsageError)):
        return EXIT_USAGE
    return EXIT_FAILURE


def describe(exc: BaseException) -> str:
    """Render an exception as a one- or two-line message for stderr."""
    if isinstance(exc, IpisKitException):
        if exc.details:
            return f"Error: {exc.message}\n  {exc.details}"
        return f"Error: {exc.message}"
    return f"Error: {exc}"
