"""Per-run solver counters.

Solvers call :func:`bump`; callers that care wrap work in :func:`counting`.
Outside a ``counting`` block the counters are discarded.
"""

from __future__ import annotations

import contextvars
from collections import Counter
from contextlib import contextmanager
from typing import Iterator

_current: contextvars.ContextVar[Counter | None] = contextvars.ContextVar("obsgames_stats", default=None)


def bump(name: str, amount: int = 1) -> None:
    counter = _current.get()
    if counter is not None:
        counter[name] += amount


@contextmanager
def counting() -> Iterator[Counter]:
    counter: Counter = Counter()
    token = _current.set(counter)
    try:
        yield counter
    finally:
        _current.reset(token)
