"""Incident-frequency trend curves: a straight line and y = a + b*exp(c*t)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ..errors import ConvergenceError, DataError
from .ols import ols_fit


@dataclass(frozen=True)
class TrendFit:
    kind: str
    params: Tuple[float, ...]
    rss: float
    iterations: int = 0

    def predict(self, t):
        return predict_trend(self, t)


def predict_trend(fit: TrendFit, t):
    t = np.asarray(t, dtype=float)
    if fit.kind == "linear":
        slope, intercept = fit.params
        out = slope * t + intercept
    else:
        a, b, c = fit.params
        out = a + b * np.exp(c * t)
    return float(out) if out.ndim == 0 else out


def _exp_model(p, t):
    a, b, c = p
    e = np.exp(c * t)
    f = a + b * e
    J = np.column_stack([np.ones_like(t), e, b * t * e])
    return f, J


def _exp_start(t, y):
    a = float(y.min())
    z = np.log(y - a + 1.0)
    c = float(ols_fit(np.column_stack([np.ones_like(t), t]), z).beta[1])
    # back-substitute: with c fixed, (a, b) is a linear least squares problem
    lin = ols_fit(np.column_stack([np.ones_like(t), np.exp(c * t)]), y)
    return np.array([lin.beta[0], lin.beta[1], c])


def _levenberg_marquardt(t, y, p0, maxit=500, ftol=1e-10):
    p = p0.astype(float)
    f, J = _exp_model(p, t)
    r = y - f
    rss = float(r @ r)
    scale = max(float(y @ y), 1e-300)
    lam = 1e-3
    for it in range(1, maxit + 1):
        d = np.sqrt(np.maximum(np.sum(J * J, axis=0), 1e-300))
        while True:
            A = np.vstack([J, math.sqrt(lam) * np.diag(d)])
            rhs = np.concatenate([r, np.zeros(len(p))])
            step, *_ = np.linalg.lstsq(A, rhs, rcond=None)
            cand = p + step
            cf, cJ = _exp_model(cand, t)
            cr = y - cf
            crss = float(cr @ cr)
            if np.isfinite(crss) and crss <= rss:
                break
            lam *= 10.0
            if lam > 1e20:
                # no downhill step exists at working precision
                return p, rss, it, True
        change = (rss - crss) / max(rss, 1e-300)
        small_step = np.all(np.abs(step) <= 1e-14 * (np.abs(p) + 1e-300))
        p, f, J, r, rss = cand, cf, cJ, cr, crss
        lam = max(lam / 10.0, 1e-15)
        if change < ftol or rss <= 1e-28 * scale or small_step:
            return p, rss, it, True
    return p, rss, maxit, False


def fit_trend(points: Sequence[Tuple[float, float]], kind: str = "exponential") -> TrendFit:
    """Fit yearly counts against t (years since the first year of data).

    The exponential curve is started from a = min(y), c from a log-linear
    regression on y - a + 1, then (a, b) by least squares given c, and
    refined with Levenberg-Marquardt.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < (3 if kind == "linear" else 4):
        raise DataError("too few (t, count) points for a trend fit")
    t, y = pts[:, 0], pts[:, 1]
    if kind == "linear":
        fit = ols_fit(np.column_stack([np.ones_like(t), t]), y)
        return TrendFit("linear", (float(fit.beta[1]), float(fit.beta[0])), fit.rss)
    if kind != "exponential":
        raise ValueError(f"unknown trend kind {kind!r}")
    if np.any(y < 0):
        raise DataError("exponential trend needs non-negative counts")
    p, rss, its, ok = _levenberg_marquardt(t, y, _exp_start(t, y))
    result = TrendFit("exponential", tuple(float(v) for v in p), rss, its)
    if not ok or not math.isfinite(p[2]):
        raise ConvergenceError("exponential trend fit did not converge in 500 iterations",
                               best=result)
    return result


def yearly_counts(records, first_year: int = 1966):
    """(t, count) pairs for every year from `first_year` to the last observed year."""
    counts = {}
    for r in records:
        counts[r.year] = counts.get(r.year, 0) + 1
    if not counts:
        raise DataError("no records to count")
    start = min(first_year, min(counts))
    return [(year - first_year, counts.get(year, 0)) for year in range(start, max(counts) + 1)]
