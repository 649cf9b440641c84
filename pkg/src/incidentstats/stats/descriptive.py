from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional

from ..errors import DataError


@dataclass(frozen=True)
class Descriptives:
    n: int
    mean: float
    median: float
    mode: float
    sd: float
    min: float
    max: float
    missing_count: int = 0


def median(values):
    """Median with the even-size case resolved as the mean of the central pair."""
    xs = sorted(values)
    n = len(xs)
    if n == 0:
        raise DataError("median of empty data")
    mid = n // 2
    if n % 2:
        return float(xs[mid])
    return (xs[mid - 1] + xs[mid]) / 2.0


def describe(values: Iterable[Optional[float]]) -> Descriptives:
    """Summary statistics over the non-missing entries of `values`.

    ``None`` and NaN count as missing. The standard deviation uses the
    n - 1 denominator; ties for the mode resolve to the smallest value.
    """
    present = []
    missing = 0
    for v in values:
        if v is None or (isinstance(v, float) and math.isnan(v)):
            missing += 1
        else:
            present.append(float(v))
    n = len(present)
    if n == 0:
        raise DataError("describe() needs at least one non-missing value")
    mean = math.fsum(present) / n
    if n > 1:
        sd = math.sqrt(math.fsum((x - mean) ** 2 for x in present) / (n - 1))
    else:
        sd = 0.0
    counts = Counter(present)
    top = max(counts.values())
    mode = min(v for v, c in counts.items() if c == top)
    return Descriptives(n=n, mean=mean, median=median(present), mode=mode, sd=sd,
                        min=min(present), max=max(present), missing_count=missing)
