"""Distribution functions built on erf, the regularized incomplete gamma
function and the regularized incomplete beta function.

Every ``*_cdf`` has a matching ``*_sf`` (upper tail) that is evaluated
directly rather than as ``1 - cdf`` so that p-values far below machine
epsilon keep their precision.
"""
import math

_EPS = 1e-16
_TINY = 1e-300
_MAXITER = 100_000


def _check(*values):
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"non-finite input: {v!r}")


def _check_df(*dfs):
    for d in dfs:
        if not d > 0:
            raise ValueError(f"degrees of freedom must be positive, got {d!r}")


def _gamma_series(a, x):
    # P(a, x) by its power series; good for x < a + 1
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAXITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_contfrac(a, x):
    # Q(a, x) by modified Lentz; good for x >= a + 1
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAXITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def gammainc_lower(a, x):
    """Regularized lower incomplete gamma function P(a, x)."""
    _check(a, x)
    if a <= 0:
        raise ValueError("shape must be positive")
    if x <= 0:
        return 0.0
    if x < a + 1.0:
        return min(1.0, _gamma_series(a, x))
    return max(0.0, 1.0 - _gamma_contfrac(a, x))


def gammainc_upper(a, x):
    """Regularized upper incomplete gamma function Q(a, x) = 1 - P(a, x)."""
    _check(a, x)
    if a <= 0:
        raise ValueError("shape must be positive")
    if x <= 0:
        return 1.0
    if x < a + 1.0:
        return max(0.0, 1.0 - _gamma_series(a, x))
    return min(1.0, _gamma_contfrac(a, x))


def _beta_contfrac(a, b, x):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAXITER):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h


def _beta_front(a, b, x):
    log_front = (a * math.log(x) + b * math.log1p(-x)
                 + math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b))
    return math.exp(log_front)


def betainc(a, b, x):
    """Regularized incomplete beta function I_x(a, b)."""
    _check(a, b, x)
    if a <= 0 or b <= 0:
        raise ValueError("shape parameters must be positive")
    if x <= 0:
        return 0.0
    if x >= 1:
        return 1.0
    if x < (a + 1.0) / (a + b + 2.0):
        return _beta_front(a, b, x) * _beta_contfrac(a, b, x) / a
    return 1.0 - _beta_front(a, b, x) * _beta_contfrac(b, a, 1.0 - x) / b


def betainc_complement(a, b, x):
    """1 - I_x(a, b) without cancellation."""
    _check(a, b, x)
    if a <= 0 or b <= 0:
        raise ValueError("shape parameters must be positive")
    if x <= 0:
        return 1.0
    if x >= 1:
        return 0.0
    if x < (a + 1.0) / (a + b + 2.0):
        return 1.0 - _beta_front(a, b, x) * _beta_contfrac(a, b, x) / a
    return _beta_front(a, b, x) * _beta_contfrac(b, a, 1.0 - x) / b


def normal_cdf(x):
    _check(x)
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_sf(x):
    _check(x)
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def chisq_cdf(x, df):
    _check(x, df)
    _check_df(df)
    return gammainc_lower(df / 2.0, x / 2.0) if x > 0 else 0.0


def chisq_sf(x, df):
    _check(x, df)
    _check_df(df)
    return gammainc_upper(df / 2.0, x / 2.0) if x > 0 else 1.0


def _t_tail(t, df):
    # P(T > |t|)
    return 0.5 * betainc(df / 2.0, 0.5, df / (df + t * t))


def t_cdf(x, df):
    _check(x, df)
    _check_df(df)
    tail = _t_tail(x, df)
    return tail if x < 0 else 1.0 - tail


def t_sf(x, df):
    _check(x, df)
    _check_df(df)
    tail = _t_tail(x, df)
    return 1.0 - tail if x < 0 else tail


def t_ppf(q, df):
    """Quantile of Student's t, by bisection refined with Newton steps."""
    _check(q, df)
    _check_df(df)
    if not 0 < q < 1:
        raise ValueError("quantile level must lie in (0, 1)")
    if q == 0.5:
        return 0.0
    lo, hi = -1.0, 1.0
    while t_cdf(lo, df) > q:
        lo *= 2.0
    while t_cdf(hi, df) < q:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if t_cdf(mid, df) < q:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14 * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


def f_cdf(x, d1, d2):
    _check(x, d1, d2)
    _check_df(d1, d2)
    if x <= 0:
        return 0.0
    return betainc(d1 / 2.0, d2 / 2.0, d1 * x / (d1 * x + d2))


def f_sf(x, d1, d2):
    _check(x, d1, d2)
    _check_df(d1, d2)
    if x <= 0:
        return 1.0
    # upper tail as I_{d2/(d2+d1 x)}(d2/2, d1/2) keeps precision for large x
    return betainc(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * x))
