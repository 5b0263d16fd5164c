import os
from concurrent.futures import ThreadPoolExecutor

WORKERS_ENV = "QPHOT_WORKERS"


def worker_count():
    """Number of worker threads, from ``QPHOT_WORKERS`` or the CPU count."""
    value = os.environ.get(WORKERS_ENV)
    if value:
        try:
            count = int(value)
        except ValueError:
            raise ValueError(f"{WORKERS_ENV} must be an integer, got {value!r}") from None
        if count < 1:
            raise ValueError(f"{WORKERS_ENV} must be >= 1, got {count}")
        return count
    return os.cpu_count() or 1


def ordered_map(func, items):
    """Map ``func`` over ``items`` concurrently; results keep input order."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
