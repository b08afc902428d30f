"""Process-wide runtime settings: worker threads, debug mode and logging."""

import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from rich.console import Console
from rich.logging import RichHandler

from .autograd.tensor import set_debug_checks

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "CONTRAILSEG_THREADS"
DEBUG_ENV = "CONTRAILSEG_DEBUG"

console = Console(file=sys.stderr)
logger = logging.getLogger(__name__)


class Runtime:
    """Class-level runtime configuration shared by all commands."""

    # Maximum number of worker threads for folds and dataset generation
    _threads: int = 1
    # Debug mode: verbose logs and tensor finiteness assertions
    _debug: bool = False

    @classmethod
    def set_threads(cls, threads: Optional[int]) -> None:
        """Cap the number of worker threads.

        Args:
            threads: Thread count; values below 1 are clamped to 1
        """
        if threads is None:
            return
        cls._threads = max(1, int(threads))

    @classmethod
    def set_debug(cls, debug: bool) -> None:
        """Enable or disable debug mode."""
        cls._debug = bool(debug)
        set_debug_checks(cls._debug)

    @classmethod
    def threads(cls) -> int:
        return cls._threads

    @classmethod
    def debug(cls) -> bool:
        return cls._debug

    @classmethod
    def configure_from_env(cls) -> None:
        """Read CONTRAILSEG_THREADS and CONTRAILSEG_DEBUG.

        Invalid thread counts are ignored with a warning rather than aborting a run.
        """
        raw = os.getenv(THREADS_ENV)
        if raw:
            try:
                cls.set_threads(int(raw))
            except ValueError:
                console.print(f"[yellow]Ignoring {THREADS_ENV}={raw!r}: not an integer[/yellow]")
        if os.getenv(DEBUG_ENV, "").lower() in ("1", "true", "yes", "on"):
            cls.set_debug(True)

    @classmethod
    def map(cls, func: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """Apply ``func`` to every item, in parallel when more than one thread is allowed.

        Results are returned in input order regardless of completion order.
        """
        items = list(items)
        if cls._threads <= 1 or len(items) <= 1:
            return [func(item) for item in items]
        workers = min(cls._threads, len(items))
        logger.debug("Running %d tasks on %d threads", len(items), workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, items))


def setup_logging(debug: bool = False) -> None:
    """Install a single rich handler on the package logger."""
    package_logger = logging.getLogger("contrail_seg")
    for handler in list(package_logger.handlers):
        if isinstance(handler, RichHandler):
            package_logger.removeHandler(handler)
    handler = RichHandler(console=Console(file=sys.stderr), show_path=False, show_time=False)
    handler.setFormatter(logging.Formatter("%(message)s"))
    package_logger.addHandler(handler)
    package_logger.setLevel(logging.DEBUG if debug else logging.INFO)
    package_logger.propagate = False
