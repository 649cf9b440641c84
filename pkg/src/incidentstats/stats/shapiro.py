"""Shapiro-Wilk W test using Royston's (1995) approximations for the
coefficients and for the null distribution of W."""
from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from ..errors import DataError
from .special import normal_sf

# polynomial coefficients, ascending powers
_C1 = (0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056)
_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)
_C3 = (0.544, -0.39978, 0.025054, -6.714e-4)
_C4 = (1.3822, -0.77857, 0.062767, -0.0020322)
_C5 = (-1.5861, -0.31082, -0.083751, 0.0038915)
_C6 = (-0.4803, -0.082676, 0.0030302)
_G = (-2.273, 0.459)


@dataclass(frozen=True)
class NormalityResult:
    W: float
    p: float
    n: int


def _poly(coefs, x):
    total = 0.0
    for c in reversed(coefs):
        total = total * x + c
    return total


def shapiro_coefficients(n: int) -> np.ndarray:
    """Antisymmetric weight vector for the order statistics of a size-n sample."""
    half = n // 2
    if n == 3:
        upper = np.array([math.sqrt(0.5)])
    else:
        nd = NormalDist()
        m = np.array([nd.inv_cdf((i - 0.375) / (n + 0.25)) for i in range(1, half + 1)])
        summ2 = 2.0 * float(m @ m)
        ssumm2 = math.sqrt(summ2)
        rsn = 1.0 / math.sqrt(n)
        a1 = _poly(_C1, rsn) - m[0] / ssumm2
        if n > 5:
            a2 = -m[1] / ssumm2 + _poly(_C2, rsn)
            fac = math.sqrt((summ2 - 2 * m[0] ** 2 - 2 * m[1] ** 2)
                            / (1 - 2 * a1 ** 2 - 2 * a2 ** 2))
            upper = -m / fac
            upper[1] = a2
        else:
            fac = math.sqrt((summ2 - 2 * m[0] ** 2) / (1 - 2 * a1 ** 2))
            upper = -m / fac
        upper[0] = a1
    a = np.zeros(n)
    a[:half] = -upper
    a[n - half:] = upper[::-1]
    return a


def shapiro_wilk(values) -> NormalityResult:
    x = np.sort(np.asarray(values, dtype=float))
    n = len(x)
    if n < 3 or n > 5000:
        raise DataError(f"Shapiro-Wilk needs 3 <= n <= 5000, got n={n}")
    rng = x[-1] - x[0]
    if rng <= 0:
        raise DataError("zero variance")
    xs = x / rng
    xs -= xs.mean()
    a = shapiro_coefficients(n)
    num = float(a @ xs)
    ssx = float(xs @ xs)
    w1 = (ssx - num * num) / ssx
    w = min(1.0, max(0.0, 1.0 - w1))
    w1 = 1.0 - w
    if n == 3:
        p = max(0.0, 6.0 / math.pi * (math.asin(math.sqrt(w)) - math.pi / 3.0))
        return NormalityResult(W=w, p=min(1.0, p), n=n)
    if w1 <= 0:
        return NormalityResult(W=w, p=1.0, n=n)
    y = math.log(w1)
    if n <= 11:
        gamma = _poly(_G, n)
        if y >= gamma:
            return NormalityResult(W=w, p=1e-99, n=n)
        y = -math.log(gamma - y)
        mean = _poly(_C3, n)
        sd = math.exp(_poly(_C4, n))
    else:
        ln = math.log(n)
        mean = _poly(_C5, ln)
        sd = math.exp(_poly(_C6, ln))
    return NormalityResult(W=w, p=normal_sf((y - mean) / sd), n=n)
