import os
from concurrent.futures import ThreadPoolExecutor

ENV_THREADS = "ROBUSTSWEEP_THREADS"


def max_workers():
    """Worker cap from ``ROBUSTSWEEP_THREADS``; all cores when unset."""
    raw = os.environ.get(ENV_THREADS, "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"{ENV_THREADS} must be a positive integer, got {raw!r}")
    return os.cpu_count() or 1


def ordered_map(func, items):
    """Map ``func`` over ``items`` and return results in input order."""
    items = list(items)
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
