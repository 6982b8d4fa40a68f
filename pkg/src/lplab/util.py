"""Small shared helpers: statistics and the worker pool."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import ValidationError

THREADS_ENV = "LPLAB_THREADS"


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn, items):
    """Map preserving input order; threads capped by LPLAB_THREADS.

    Work items must be independent (they are: every sweep point is
    seeded by its own parameters), so the execution order never affects
    the results.
    """
    items = list(items)
    n = worker_count()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def max_over_median(values) -> float:
    """Boundedness statistic: max divided by median of positive values."""
    vals = [v for v in values if v is not None]
    if not vals:
        raise ValidationError("no values to aggregate")
    med = float(np.median(vals))
    if med <= 0:
        return float("inf") if max(vals) > 0 else 1.0
    return float(max(vals)) / med


def slope_regression(ks, values):
    """Least squares of log2(value) against k.

    Returns (slope, intercept, stderr of the slope).  Needs at least
    three points and strictly positive values.
    """
    ks = np.asarray(list(ks), dtype=np.float64)
    vals = np.asarray(list(values), dtype=np.float64)
    if ks.size < 3:
        raise ValidationError(f"slope regression needs >= 3 points, got {ks.size}")
    if np.any(vals <= 0) or not np.all(np.isfinite(vals)):
        raise ValidationError("slope regression needs positive finite values")
    y = np.log2(vals)
    kbar = ks.mean()
    denom = float(np.sum((ks - kbar) ** 2))
    if denom == 0:
        raise ValidationError("slope regression needs distinct k values")
    slope = float(np.sum((ks - kbar) * (y - y.mean())) / denom)
    intercept = float(y.mean() - slope * kbar)
    resid = y - (slope * ks + intercept)
    dof = ks.size - 2
    stderr = float(np.sqrt(np.sum(resid**2) / dof / denom)) if dof > 0 else 0.0
    return slope, intercept, stderr
