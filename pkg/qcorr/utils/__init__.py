from __future__ import annotations

import enum
import logging
import sys
import time
from typing import Dict

import numpy as np

LOG_FORMAT = "[%(asctime)s] [%(threadName)s] [%(name)s.%(funcName)s:%(lineno)s] [%(levelname)s]: %(message)s"
REPR_DIGITS = 6


def setup_logger(name: str = "qcorr", level="WARNING") -> logging.Logger:
    """
    Routes a logger to stderr. Calling it again for the same logger only changes the level,
    so repeated CLI invocations in one process do not duplicate output

    :param name: Logger name, the package root by default
    :param level: Level name or number
    :return: The configured logger
    """
    logger = logging.getLogger(name)
    logger.setLevel(level)
    if not any(getattr(h, "_qcorr_handler", False) for h in logger.handlers):
        stream_handler = logging.StreamHandler(sys.stderr)
        stream_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        stream_handler._qcorr_handler = True
        logger.addHandler(stream_handler)
    return logger


def _format_value(value) -> str:
    if isinstance(value, np.ndarray):
        return "ndarray({})".format("x".join(str(s) for s in value.shape))
    if isinstance(value, (float, np.floating)):
        return repr(round(float(value), REPR_DIGITS))
    return repr(value)


def repr_format(obj, **fields) -> str:
    """
    Formats ``ClassName(field1=value1, field2=value2)``. Floats are rounded and arrays
    are shown by shape only
    """
    inner = ", ".join(f"{k}={_format_value(v)}" for k, v in fields.items())
    return f"{obj.__class__.__name__}({inner})"


class Stopwatch:
    """
    Wall-clock timer, also usable as a context manager. Timings only ever go to the log
    """
    def __init__(self):
        self._t_start = None
        self._t_stop = None

    def start(self):
        self._t_start = time.perf_counter()
        self._t_stop = None

    def stop(self):
        if self.is_running:
            self._t_stop = time.perf_counter()

    @property
    def is_running(self) -> bool:
        return self._t_start is not None and self._t_stop is None

    @property
    def elapsed(self) -> float:
        """
        Seconds since start, or between start and stop once stopped
        """
        if self._t_start is None:
            raise RuntimeError("Stopwatch was never started")
        end = time.perf_counter() if self._t_stop is None else self._t_stop
        return end - self._t_start

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.stop()
        return False


class IntEnumWithDescription(int, enum.Enum):
    """
    Integer enum whose members are declared as ``name = value, "description"``. The description
    is the member's serialized form in reports
    """
    def __new__(cls, value: int, description: str = ""):
        obj = int.__new__(cls, value)
        obj._value_ = value
        obj._description_ = description
        return obj

    @property
    def description(self) -> str:
        return self._description_ or self.name

    @classmethod
    def _by_description(cls) -> Dict[str, IntEnumWithDescription]:
        return {member.description: member for member in cls}

    @classmethod
    def from_description(cls, description: str):
        try:
            return cls._by_description()[description]
        except KeyError:
            raise ValueError(f"No {cls.__name__} with description '{description}'") from None

    def __str__(self):
        return self.description
