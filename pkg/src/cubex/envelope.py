"""Fitted-constant envelope tests and check records shared by every driver."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

SLOPE_THRESHOLD = 0.15


@dataclass
class CheckRecord:
    name: str
    observed: float
    threshold: float
    passed: bool
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class EnvelopeFit:
    """Max ratio per size, overall max, and the log-log slope of the maxima."""

    name: str
    sizes: list[float]
    per_size_max: list[float]
    max_ratio: float
    log_slope: float
    threshold: float = SLOPE_THRESHOLD
    diagnostics: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return math.isfinite(self.max_ratio) and math.isfinite(self.log_slope) \
            and self.log_slope <= self.threshold

    def summary(self) -> dict:
        return {"sizes": self.sizes, "per_size_max": self.per_size_max,
                "max_ratio": self.max_ratio, "log_slope": self.log_slope}

    def record(self, **extra) -> CheckRecord:
        details = {**self.summary(), **self.diagnostics, **extra}
        return CheckRecord(self.name, self.log_slope, self.threshold, self.passed, details)


def log_slope(sizes: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of log(values) against log(sizes).

    Zero values carry no growth information and are dropped; fewer than two
    usable points give slope 0.
    """
    pts = [(math.log(s), math.log(v)) for s, v in zip(sizes, values) if v > 0]
    if any(not math.isfinite(y) for _, y in pts):
        return math.inf
    if len(pts) < 2:
        return 0.0
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    return float(np.polyfit(x, y, 1)[0])


def fit_envelope(name: str, ratios_by_size: dict, threshold: float = SLOPE_THRESHOLD) -> EnvelopeFit:
    """``ratios_by_size`` maps a size parameter to the ratios observed at it."""
    sizes = sorted(ratios_by_size)
    maxima = [float(max(ratios_by_size[s], default=0.0)) for s in sizes]
    overall = max(maxima, default=0.0)
    return EnvelopeFit(name, [float(s) for s in sizes], maxima, overall,
                       log_slope(sizes, maxima), threshold)


def bucket_sizes(values: Sequence[int], base: int = 2) -> dict:
    """Group integers into dyadic (or base-b) buckets keyed by the bucket start."""
    out: dict = {}
    for v in values:
        k = base ** int(math.floor(math.log(v, base) + 1e-12))
        out.setdefault(k, []).append(v)
    return out
