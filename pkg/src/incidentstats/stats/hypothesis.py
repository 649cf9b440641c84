"""Goodness-of-fit, two-sample and rank-based tests."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from ..errors import DataError
from .special import chisq_sf, normal_sf, t_ppf, t_sf


@dataclass(frozen=True)
class GofRow:
    label: str
    observed: float
    expected: float
    pearson_residual: float

    @property
    def direction(self) -> str:
        return "Higher" if self.observed > self.expected else "Lower"


@dataclass(frozen=True)
class GofResult:
    chi2: float
    df: int
    p: float
    rows: tuple


@dataclass(frozen=True)
class WelchResult:
    t: float
    df: float
    p: float
    ci_low: float
    ci_high: float
    mean_x: float
    mean_y: float


@dataclass(frozen=True)
class RankTestResult:
    H: float
    df: int
    p: float


@dataclass(frozen=True)
class PosthocRow:
    group_a: str
    group_b: str
    z: float
    p_unadj: float
    p_adj: float


def chi_square_gof(observed: Sequence[float], expected: Optional[Sequence[float]] = None,
                   labels: Optional[Sequence[str]] = None) -> GofResult:
    """Pearson chi-square goodness of fit.

    With `expected` omitted the cells are compared against a uniform split
    of the total. Residuals are Pearson residuals ``(O - E) / sqrt(E)``,
    whose squares sum to the statistic.
    """
    obs = [float(o) for o in observed]
    k = len(obs)
    if k < 2:
        raise DataError("chi-square goodness of fit needs at least two categories")
    if labels is None:
        labels = [str(i + 1) for i in range(k)]
    if len(labels) != k:
        raise DataError("labels and observed counts differ in length")
    if expected is None:
        exp = [math.fsum(obs) / k] * k
    else:
        exp = [float(e) for e in expected]
        if len(exp) != k:
            raise DataError("observed and expected counts differ in length")
    rows = []
    for label, o, e in zip(labels, obs, exp):
        if not e > 0:
            raise DataError(f"expected count for cell {label!r} must be positive")
        rows.append(GofRow(str(label), o, e, (o - e) / math.sqrt(e)))
    chi2 = math.fsum(r.pearson_residual ** 2 for r in rows)
    df = k - 1
    return GofResult(chi2=chi2, df=df, p=chisq_sf(chi2, df), rows=tuple(rows))


def welch_t(x: Sequence[float], y: Sequence[float], conf_level: float = 0.95) -> WelchResult:
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    nx, ny = len(xa), len(ya)
    if nx < 2 or ny < 2:
        raise DataError("Welch's t-test needs at least two observations per group")
    mx, my = float(xa.mean()), float(ya.mean())
    vx, vy = float(xa.var(ddof=1)), float(ya.var(ddof=1))
    if vx == 0 and vy == 0:
        raise DataError("both groups have zero variance")
    sx, sy = vx / nx, vy / ny
    se = math.sqrt(sx + sy)
    if se == 0:
        raise DataError("standard error underflows to zero")
    diff = mx - my
    t = diff / se
    # Welch-Satterthwaite in ratio form so tiny variances cannot underflow
    wx, wy = sx / (sx + sy), sy / (sx + sy)
    df = 1.0 / (wx ** 2 / (nx - 1) + wy ** 2 / (ny - 1))
    p = min(1.0, 2.0 * t_sf(abs(t), df))
    half = t_ppf(0.5 + conf_level / 2.0, df) * se
    return WelchResult(t=t, df=df, p=p, ci_low=diff - half, ci_high=diff + half,
                       mean_x=mx, mean_y=my)


def _pooled_ranks(groups):
    sizes = [len(g) for g in groups]
    if len(groups) < 2:
        raise DataError("rank tests need at least two groups")
    if min(sizes) == 0:
        raise DataError("rank tests need every group to be non-empty")
    pooled = np.concatenate([np.asarray(g, dtype=float) for g in groups])
    order = np.argsort(pooled, kind="mergesort")
    ranks = np.empty(len(pooled))
    sorted_vals = pooled[order]
    tie_term = 0.0
    i = 0
    n = len(pooled)
    while i < n:
        j = i
        while j + 1 < n and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        t = j - i + 1
        tie_term += t ** 3 - t
        i = j + 1
    bounds = np.cumsum([0] + sizes)
    mean_ranks = [float(ranks[bounds[k]:bounds[k + 1]].mean()) for k in range(len(groups))]
    return n, sizes, mean_ranks, tie_term


def kruskal_wallis(groups: Sequence[Sequence[float]]) -> RankTestResult:
    """Kruskal-Wallis H with mid-ranks and the usual tie correction."""
    n, sizes, mean_ranks, tie_term = _pooled_ranks(groups)
    correction = 1.0 - tie_term / (n ** 3 - n)
    if correction <= 0:
        raise DataError("no variance in ranks: all values are tied")
    ss = math.fsum(s * r * r for s, r in zip(sizes, mean_ranks))
    h = (12.0 / (n * (n + 1)) * ss - 3.0 * (n + 1)) / correction
    h = max(h, 0.0)
    df = len(groups) - 1
    return RankTestResult(H=h, df=df, p=chisq_sf(h, df))


def bonferroni(p_values, m=None):
    ps = list(p_values)
    m = len(ps) if m is None else m
    return [min(1.0, m * p) for p in ps]


def dunn_posthoc(groups: Sequence[Sequence[float]], labels: Optional[Sequence[str]] = None):
    """Dunn's pairwise rank comparisons with Bonferroni adjustment.

    z for the pair (a, b) is the difference of mean ranks over its standard
    error, with the tie-adjusted variance term shared by every pair.
    """
    if labels is None:
        labels = [str(i + 1) for i in range(len(groups))]
    n, sizes, mean_ranks, tie_term = _pooled_ranks(groups)
    base = n * (n + 1) / 12.0 - tie_term / (12.0 * (n - 1))
    if base <= 0:
        raise DataError("no variance in ranks: all values are tied")
    pairs = list(combinations(range(len(groups)), 2))
    m = len(pairs)
    rows = []
    for a, b in pairs:
        se = math.sqrt(base * (1.0 / sizes[a] + 1.0 / sizes[b]))
        z = (mean_ranks[a] - mean_ranks[b]) / se
        p = min(1.0, 2.0 * normal_sf(abs(z)))
        rows.append(PosthocRow(str(labels[a]), str(labels[b]), z, p, bonferroni([p], m)[0]))
    return rows
