import logging
import threading

from rich.logging import RichHandler

from contrail_seg.autograd import tensor
from contrail_seg.runtime import DEBUG_ENV, THREADS_ENV, Runtime, setup_logging


def test_threads_are_read_from_the_environment(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")

    Runtime.configure_from_env()

    assert Runtime.threads() == 3


def test_invalid_thread_count_is_ignored(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "many")

    Runtime.configure_from_env()

    assert Runtime.threads() == 1


def test_thread_count_is_clamped_to_one():
    Runtime.set_threads(0)

    assert Runtime.threads() == 1


def test_debug_env_turns_on_tensor_checks(monkeypatch):
    monkeypatch.setenv(DEBUG_ENV, "true")

    Runtime.configure_from_env()

    assert Runtime.debug()
    assert tensor._debug_checks


def test_map_keeps_input_order_across_threads():
    Runtime.set_threads(4)

    assert Runtime.map(lambda x: x * x, range(20)) == [x * x for x in range(20)]


def test_map_runs_inline_with_one_thread():
    main = threading.get_ident()

    assert Runtime.map(lambda _: threading.get_ident(), range(3)) == [main] * 3


def test_setup_logging_installs_a_single_rich_handler():
    setup_logging(debug=True)
    setup_logging(debug=False)

    package_logger = logging.getLogger("contrail_seg")
    handlers = [h for h in package_logger.handlers if isinstance(h, RichHandler)]
    assert len(handlers) == 1
    assert package_logger.level == logging.INFO
    package_logger.removeHandler(handlers[0])
