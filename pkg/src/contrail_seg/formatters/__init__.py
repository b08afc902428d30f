"""Output formatters for reports and overlays."""

from .csv_formatter import CSVFormatter
from .display import DisplayFormatter, is_script_context
from .format_decorator import REPORT_FORMATS, format_decorator
from .generic_handlers import create_format_handlers
from .json_formatter import JSONFormatter
from .markdown_formatter import MarkdownFormatter
from .overlay import render_overlay, save_overlay

__all__ = [
    "CSVFormatter",
    "DisplayFormatter",
    "is_script_context",
    "REPORT_FORMATS",
    "format_decorator",
    "create_format_handlers",
    "JSONFormatter",
    "MarkdownFormatter",
    "render_overlay",
    "save_overlay",
]
