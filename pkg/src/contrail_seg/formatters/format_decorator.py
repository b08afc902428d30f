"""Format decorator for CLI commands."""

from functools import wraps
from typing import Callable, List

import click

from .display import is_script_context
from .generic_handlers import create_format_handlers

REPORT_FORMATS = ["table", "json", "csv", "markdown"]


def format_decorator(
    entity_type: str,
    formats: List[str] = REPORT_FORMATS,
    interactive_default: str = "table",
    script_default: str = "json",
) -> Callable:
    """Add a ``--format`` option and inject a ``format_handler`` into the command.

    Args:
        entity_type: Report type used to look up formatter methods
        formats: Formats offered by click.Choice
        interactive_default: Format used when stdout is a terminal
        script_default: Format used when stdout is piped or redirected

    Returns:
        Decorated function that receives a format_handler parameter
    """
    handlers = create_format_handlers(entity_type, formats)

    def decorator(func: Callable) -> Callable:
        func = click.option(
            "-f",
            "--format",
            "output_format",
            type=click.Choice(formats, case_sensitive=False),
            default=None,
            help=(
                f"Output format ({', '.join(formats)}). Defaults to '{interactive_default}' "
                f"on a terminal, '{script_default}' otherwise."
            ),
        )(func)

        @wraps(func)
        def wrapper(*args, **kwargs):
            format_choice = kwargs.pop("output_format", None)
            if format_choice is None:
                format_choice = script_default if is_script_context() else interactive_default
            kwargs["format_handler"] = handlers[format_choice.lower()]
            return func(*args, **kwargs)

        return wrapper

    return decorator
