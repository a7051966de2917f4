"""Logging utilities for esltypo."""

import logging
from typing import Literal

LogLevel = Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


def get_logger(name: str) -> logging.Logger:
    """Get a logger nested under the esltypo namespace.

    Args:
        name: the name of the logger; names outside the package are prefixed with 'esltypo.'

    Returns:
        a logger instance
    """
    if name == "esltypo" or name.startswith("esltypo."):
        return logging.getLogger(name)
    return logging.getLogger(f"esltypo.{name}")


def configure_logging(level: LogLevel = "INFO") -> None:
    """Configure logging for esltypo.

    Args:
        level: the log level to use
    """
    handlers: list[logging.Handler] = []
    try:
        from rich.console import Console
        from rich.logging import RichHandler

        handlers.append(RichHandler(console=Console(stderr=True), rich_tracebacks=True))
    except ImportError:
        pass

    if not handlers:
        handlers.append(logging.StreamHandler())

    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=handlers,
        force=True,
    )
