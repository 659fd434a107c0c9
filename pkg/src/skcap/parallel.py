"""Thread-pool map with a worker cap taken from SKC_THREADS."""

from concurrent.futures import ThreadPoolExecutor
import os

from .errors import UsageError


def max_workers():
    env = os.environ.get("SKC_THREADS")
    if env is None or env == "":
        return os.cpu_count() or 1
    try:
        n = int(env)
    except ValueError:
        raise UsageError(f"SKC_THREADS must be a positive integer, got {env!r}") from None
    if n < 1:
        raise UsageError(f"SKC_THREADS must be a positive integer, got {env!r}")
    return n


def pmap(fn, items):
    """``[fn(x) for x in items]``, possibly on worker threads; order is kept."""
    items = list(items)
    n = min(max_workers(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))
