from __future__ import annotations

import logging
import multiprocessing
import os
import threading
from pathlib import PurePath

from rich.logging import RichHandler
from rich.text import Text

_SET_UP_LOGGERS: set[str] = set()
_ADDITIONAL_HANDLERS: list[logging.Handler] = []


def _interpret_level_from_env(level: str | None, *, default=logging.INFO) -> int:
    if not level:
        return default
    if level.isnumeric():
        return int(level)
    return getattr(logging, level.upper())


_STREAM_LEVEL = _interpret_level_from_env(os.environ.get("MFPRICING_LOG_STREAM_LEVEL"))
_FILE_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

_THREAD_NAME_TO_LOG_SUFFIX: dict[str, str] = {}


def _worker_name() -> str | None:
    """Name of the current worker thread, or of the worker process when the
    sweep runs on a process pool. `None` in the main thread of the main process.
    """
    thread_name = threading.current_thread().name
    if thread_name != "MainThread":
        return thread_name
    process_name = multiprocessing.current_process().name
    if process_name != "MainProcess":
        return process_name
    return None


def register_thread_name(name: str) -> None:
    """Attach a readable suffix (e.g. the sweep point being evaluated) to
    loggers created from the current worker thread or process.
    """
    worker = _worker_name()
    if worker is not None:
        _THREAD_NAME_TO_LOG_SUFFIX[worker] = name


class _RichHandlerWithEmoji(RichHandler):
    def __init__(self, emoji: str, *args, **kwargs):
        super().__init__(*args, **kwargs)
        if not emoji.endswith(" "):
            emoji += " "
        self.emoji = emoji

    def get_level_text(self, record: logging.LogRecord) -> Text:
        level_name = record.levelname
        return Text.styled((self.emoji + level_name).ljust(10), f"logging.level.{level_name.lower()}")


def set_stream_level(level: int | str) -> None:
    """Change the console level of all loggers handed out so far and of all
    loggers created later. Used by the CLI's `--verbose`/`--quiet` flags.
    """
    global _STREAM_LEVEL
    _STREAM_LEVEL = _interpret_level_from_env(str(level)) if isinstance(level, str) else level
    for name in _SET_UP_LOGGERS:
        logger = logging.getLogger(name)
        logger.setLevel(min([_STREAM_LEVEL, *(h.level for h in _ADDITIONAL_HANDLERS)]))
        for handler in logger.handlers:
            if isinstance(handler, _RichHandlerWithEmoji):
                handler.setLevel(_STREAM_LEVEL)


def add_file_handler(path: PurePath | str, *, level: int = logging.DEBUG) -> logging.Handler:
    """Mirror every mf-pricing logger into `path`, e.g. a `run.log` next to the
    CSV files of an experiment. Returns the handler so it can be removed again.
    """
    handler = logging.FileHandler(path, encoding="utf-8")
    handler.setFormatter(logging.Formatter(_FILE_FORMAT))
    handler.setLevel(level)
    _ADDITIONAL_HANDLERS.append(handler)
    for name in _SET_UP_LOGGERS:
        logger = logging.getLogger(name)
        logger.addHandler(handler)
        logger.setLevel(min(logger.level, level))
    return handler


def remove_file_handler(handler: logging.Handler) -> None:
    if handler in _ADDITIONAL_HANDLERS:
        _ADDITIONAL_HANDLERS.remove(handler)
    for name in _SET_UP_LOGGERS:
        logging.getLogger(name).removeHandler(handler)
    handler.close()


def get_logger(name: str, *, emoji: str = "📈") -> logging.Logger:
    """Get logger. Use this instead of `logging.getLogger` to ensure
    that the logger is set up with the correct handlers.
    """
    worker = _worker_name()
    if worker is not None:
        name = name + "-" + _THREAD_NAME_TO_LOG_SUFFIX.get(worker, worker)
    logger = logging.getLogger(name)
    # handlers on the root logger (pytest, basicConfig) must not count
    if name in _SET_UP_LOGGERS:
        return logger
    handler = _RichHandlerWithEmoji(
        emoji=emoji,
        show_time=bool(os.environ.get("MFPRICING_LOG_TIME", False)),
        show_path=False,
    )
    handler.setLevel(_STREAM_LEVEL)
    logger.setLevel(_STREAM_LEVEL)
    logger.addHandler(handler)
    logger.propagate = False
    _SET_UP_LOGGERS.add(name)
    for extra in _ADDITIONAL_HANDLERS:
        logger.addHandler(extra)
        logger.setLevel(min(logger.level, extra.level))
    return logger
