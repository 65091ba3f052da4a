# parallel-cfs/tools/utils.py

import logging
import re
import time
from contextlib import contextmanager
from typing import Dict, Iterable, List, Optional

_LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str = "WARNING") -> None:
    """Route all package loggers to stderr at `level`. Safe to call more than once."""
    logging.basicConfig(level=level.upper(), format=_LOG_FORMAT, force=True)


def parse_int_list(text: object) -> List[int]:
    """
    Parse a comma separated list of integers such as '1,2,4'.
    Whitespace is ignored; an empty string gives an empty list.
    """
    if text is None:
        return []
    tokens = [t for t in re.split(r"[\s,]+", str(text).strip()) if t]
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ValueError(f"expected a comma separated list of integers, got {text!r}") from None


def parse_float_list(text: object) -> List[float]:
    if text is None:
        return []
    tokens = [t for t in re.split(r"[\s,]+", str(text).strip()) if t]
    try:
        return [float(t) for t in tokens]
    except ValueError:
        raise ValueError(f"expected a comma separated list of numbers, got {text!r}") from None


def format_subset(features: Iterable[int]) -> str:
    return "{" + ",".join(str(f) for f in features) + "}"


@contextmanager
def phase_timer(timings: Dict[str, float], phase: str, log: Optional[logging.Logger] = None):
    """Record the wall time of the enclosed block, in milliseconds, under timings[phase]."""
    start = time.perf_counter()
    try:
        yield
    finally:
        elapsed = (time.perf_counter() - start) * 1000.0
        timings[phase] = elapsed
        if log is not None:
            log.info("%s took %.1f ms", phase, elapsed)
