"""
Worker-count context for independent window checks.

Uses contextvars so that each CLI invocation (or test) carries its own
worker count without threading it through every checker signature.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from contextvars import ContextVar, copy_context
from typing import Callable, Iterable, List, Optional, TypeVar

from config import get_default_jobs

T = TypeVar("T")
U = TypeVar("U")

_jobs: ContextVar[Optional[int]] = ContextVar("_jobs", default=None)


def set_jobs(jobs: Optional[int]) -> None:
    """Set the worker count for checks run in this context."""
    _jobs.set(jobs)


def get_jobs() -> int:
    """Get the worker count for this context, falling back to the configured default."""
    jobs = _jobs.get()
    return jobs if jobs is not None else get_default_jobs()


def map_ordered(fn: Callable[[T], U], items: Iterable[T]) -> List[U]:
    """Apply fn to every item; results come back in input order."""
    work = list(items)
    jobs = get_jobs()
    if jobs <= 1 or len(work) <= 1:
        return [fn(item) for item in work]
    context = copy_context()
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda item: context.copy().run(fn, item), work))


def first_result(fn: Callable[[T], Optional[U]], items: Iterable[T]) -> Optional[U]:
    """The first non-None fn(item) in input order, independent of the worker count."""
    work = list(items)
    jobs = get_jobs()
    if jobs <= 1:
        for item in work:
            result = fn(item)
            if result is not None:
                return result
        return None
    chunk = jobs * 4
    for start in range(0, len(work), chunk):
        for result in map_ordered(fn, work[start : start + chunk]):
            if result is not None:
                return result
    return None
