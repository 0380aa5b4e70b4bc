"""Worker-count control for internally parallel computations.

``HPA_DYN_THREADS`` caps the number of worker processes; 0 or unset means
the hardware default.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

from .errors import ConfigError

ENV_VAR = "HPA_DYN_THREADS"


def worker_count() -> int:
    raw = os.environ.get(ENV_VAR, "").strip()
    if raw in ("", "0"):
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{ENV_VAR} must be a nonnegative integer, got {raw!r}")
    if n < 0:
        raise ConfigError(f"{ENV_VAR} must be a nonnegative integer, got {raw!r}")
    return n


def map_ordered(fn, items):
    """Map preserving input order, using processes when allowed and useful."""
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
