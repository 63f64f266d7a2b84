"""Scalar statistics primitives: normal CDF/quantile, streaming moments, entropy."""

from __future__ import annotations

import math
from typing import Iterable, Sequence

__all__ = ["phi", "z_quantile", "mean_var", "entropy"]

_SQRT2 = math.sqrt(2.0)


def phi(x: float) -> float:
    """Standard normal CDF, accurate to well below 1e-9 in absolute error."""
    if not math.isfinite(x):
        raise ValueError(f"phi requires finite x, got {x}")
    return 0.5 * math.erfc(-x / _SQRT2)


def z_quantile(alpha: float) -> float:
    """(1 - alpha)-quantile of the standard normal.

    Newton iteration on phi with a bisection fallback; round-trip error
    phi(z_quantile(a)) - (1 - a) stays below 1e-12.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    target = 1.0 - alpha
    # bracket: the quantile of any alpha in (0,1) lies inside [-40, 40]
    lo, hi = -40.0, 40.0
    x = 0.0
    for _ in range(100):
        fx = phi(x) - target
        if fx > 0:
            hi = x
        else:
            lo = x
        pdf = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        if pdf > 0:
            step = fx / pdf
            nx = x - step
            if not (lo < nx < hi):
                nx = 0.5 * (lo + hi)
        else:
            nx = 0.5 * (lo + hi)
        if abs(nx - x) < 1e-15 * max(1.0, abs(x)):
            x = nx
            break
        x = nx
    return x


def mean_var(samples: Sequence[float]) -> tuple[float, float]:
    """One-pass (Welford) mean and unbiased variance."""
    n = 0
    mean = 0.0
    m2 = 0.0
    for v in samples:
        n += 1
        delta = v - mean
        mean += delta / n
        m2 += delta * (v - mean)
    if n < 2:
        raise ValueError("variance needs at least 2 samples")
    return mean, m2 / (n - 1)


def entropy(proportions: Iterable[float]) -> float:
    """Shannon entropy in bits of a discrete distribution; 0 log 0 = 0."""
    props = list(proportions)
    total = math.fsum(props)
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"proportions must sum to 1, got {total}")
    h = 0.0
    for p in props:
        if p < 0:
            raise ValueError(f"negative proportion {p}")
        if p > 0:
            h -= p * math.log2(p)
    return h
