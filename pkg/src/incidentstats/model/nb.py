"""Negative binomial regression with a log link.

Coefficients come from IRLS at a given dispersion; the dispersion is then
re-estimated by maximum likelihood and the two steps alternate until the
deviance settles. Parameterisation: mean mu, size theta, and
Var(Y) = mu + alpha * mu**2 with alpha = 1 / theta.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.special import digamma, gammaln, polygamma

from ..errors import DataError
from ..stats.special import chisq_sf
from .design import DesignMatrix, encode_design
from .formula import term_label
from .ols import AnovaRow, AnovaTable

log = logging.getLogger(__name__)

THETA_MIN = 1e-4
THETA_MAX = 1e8
_ETA_MAX = 700.0


@dataclass(frozen=True)
class NbParams:
    theta: float

    @property
    def alpha(self):
        return 1.0 / self.theta

    def variance(self, mu):
        return mu + self.alpha * mu ** 2


@dataclass
class NbFit:
    beta: np.ndarray
    mu: np.ndarray
    deviance: float
    theta: float
    iterations: int
    converged: bool
    loglik: float
    standard_errors: np.ndarray
    names: List[str]
    theta_at_bound: bool = False
    deviance_trace: List[List[float]] = field(default_factory=list, repr=False)
    loglik_trace: List[float] = field(default_factory=list, repr=False)
    warnings: List[str] = field(default_factory=list)

    @property
    def alpha(self):
        return 1.0 / self.theta

    @property
    def params(self):
        return NbParams(self.theta)

    @property
    def df_residual(self):
        return len(self.mu) - len(self.beta)


def nb_deviance(y, mu, theta):
    y = np.asarray(y, dtype=float)
    mu = np.asarray(mu, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ylogy = np.where(y > 0, y * np.log(y / mu), 0.0)
    if math.isinf(theta):
        return float(2.0 * np.sum(ylogy - (y - mu)))
    # (y + theta) log((y + theta)/(mu + theta)) without cancellation
    tail = (y + theta) * np.log1p((y - mu) / (mu + theta))
    return float(2.0 * np.sum(ylogy - tail))


def _exceed_counts(y):
    """c[k] = #{i: y_i > k} for k < max(y); y holds non-negative integers."""
    top = int(y.max()) if y.size else 0
    return np.bincount(y.astype(np.int64), minlength=top + 1)[::-1].cumsum()[::-1][1:]


def _integral(y):
    return y.size and np.all(y == np.round(y)) and y.max() <= 1e6


def nb_loglik(y, mu, theta):
    y = np.asarray(y, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if math.isinf(theta):
        return float(np.sum(y * np.log(np.where(mu > 0, mu, 1.0)) - mu - gammaln(y + 1)))
    if not _integral(y):
        return float(np.sum(gammaln(y + theta) - gammaln(theta) - gammaln(y + 1)
                            + theta * np.log(theta / (theta + mu))
                            + y * np.log(mu / (theta + mu))))
    # log Gamma(y + theta) - log Gamma(theta) - y log theta = sum_k log1p(k / theta),
    # which stays accurate as theta grows toward the Poisson limit
    c = _exceed_counts(y)
    ratio = float(np.dot(c, np.log1p(np.arange(c.size) / theta)))
    with np.errstate(divide="ignore", invalid="ignore"):
        ylogmu = np.where(y > 0, y * np.log(mu), 0.0)
    return ratio + float(np.sum(ylogmu - (theta + y) * np.log1p(mu / theta) - gammaln(y + 1)))


def _wls(X, z, w):
    sw = np.sqrt(w)
    coef, *_ = np.linalg.lstsq(X * sw[:, None], z * sw, rcond=None)
    return coef


def _mu(X, beta):
    return np.exp(np.clip(X @ beta, -_ETA_MAX, _ETA_MAX))


def _irls(X, y, theta, beta=None, maxit=100, tol=1e-10):
    """IRLS at fixed theta; step-halving keeps the deviance non-increasing."""
    if beta is None:
        eta = np.log(y + 0.1)
        mu = np.exp(eta)
        w = mu / (1.0 + mu / theta)
        beta = _wls(X, eta + (y - mu) / mu, w)
    mu = _mu(X, beta)
    dev = nb_deviance(y, mu, theta)
    trace = [dev]
    converged = False
    it = 0
    for it in range(1, maxit + 1):
        eta = X @ beta
        w = mu / (1.0 + mu / theta)
        z = eta + (y - mu) / mu
        new = _wls(X, z, w)
        new_mu = _mu(X, new)
        new_dev = nb_deviance(y, new_mu, theta)
        halvings = 0
        while not (np.isfinite(new_dev) and new_dev <= dev * (1 + 1e-12) + 1e-300):
            halvings += 1
            if halvings > 40:
                break
            new = 0.5 * (new + beta)
            new_mu = _mu(X, new)
            new_dev = nb_deviance(y, new_mu, theta)
        if halvings > 40:
            break
        change = abs(dev - new_dev) / (abs(new_dev) + 0.1)
        beta, mu, dev = new, new_mu, min(new_dev, dev)
        trace.append(dev)
        if change < tol:
            converged = True
            break
    return beta, mu, dev, it, trace, converged


def _theta_score(theta, y, mu):
    if _integral(y):
        c = _exceed_counts(y)
        dig = float(np.dot(c, 1.0 / (theta + np.arange(c.size))))
        return dig + float(np.sum((mu - y) / (theta + mu) - np.log1p(mu / theta)))
    return float(np.sum(digamma(y + theta) - digamma(theta) + math.log(theta) + 1.0
                        - np.log(theta + mu) - (y + theta) / (theta + mu)))


def _theta_hess(theta, y, mu):
    if _integral(y):
        c = _exceed_counts(y)
        tri = -float(np.dot(c, 1.0 / (theta + np.arange(c.size)) ** 2))
        return tri + float(np.sum((mu ** 2 + theta * y) / (theta * (theta + mu) ** 2)))
    return float(np.sum(polygamma(1, y + theta) - polygamma(1, theta) + 1.0 / theta
                        - 2.0 / (theta + mu) + (y + theta) / (theta + mu) ** 2))


def theta_ml(y, mu, theta0=None, maxit=200):
    """Maximum likelihood dispersion for fixed means.

    Newton steps on log(theta) with step-halving, confined to
    [THETA_MIN, THETA_MAX]. Returns (theta, at_bound).
    """
    y = np.asarray(y, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if theta0 is None:
        denom = float(np.sum((y / mu - 1.0) ** 2))
        theta0 = len(y) / denom if denom > 0 else THETA_MAX
    lo, hi = math.log(THETA_MIN), math.log(THETA_MAX)
    s = min(max(math.log(theta0), lo), hi)
    ll = nb_loglik(y, mu, math.exp(s))
    for _ in range(maxit):
        th = math.exp(s)
        g = th * _theta_score(th, y, mu)
        h = th * th * _theta_hess(th, y, mu) + g
        step = -g / h if h < 0 else math.copysign(1.0, g)
        step = max(-3.0, min(3.0, step))
        accepted = False
        for _ in range(60):
            cand = min(max(s + step, lo), hi)
            cand_ll = nb_loglik(y, mu, math.exp(cand))
            if cand_ll >= ll:
                accepted = True
                break
            step *= 0.5
        if not accepted or abs(cand - s) < 1e-10:
            if accepted:
                s, ll = cand, cand_ll
            break
        s, ll = cand, cand_ll
    # near a bound the likelihood is too flat (and the score too noisy) for
    # Newton to finish the walk; snap when the bound is no worse
    for edge in (hi, lo):
        if s != edge and abs(edge - s) < math.log(1e3):
            edge_ll = nb_loglik(y, mu, math.exp(edge))
            if edge_ll >= ll - 1e-10 * abs(ll):
                s, ll = edge, edge_ll
    at_bound = s >= hi - 1e-9 or s <= lo + 1e-9
    return math.exp(s), at_bound


def nb_fit(X, y, fixed_theta: Optional[float] = None, names=None, maxit=50,
           tol=1e-8) -> NbFit:
    """Fit a negative binomial GLM with log link.

    With `fixed_theta` only the coefficients are estimated. Otherwise theta
    and beta are updated alternately until the relative deviance change
    drops below `tol` or `maxit` outer iterations pass. Divergence is
    reported through ``converged=False``; the last iterate is returned.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if names is None:
        names = [f"x{j}" for j in range(X.shape[1])]
    if np.any(y < 0) or np.any(y != np.round(y)):
        raise DataError("negative binomial response must be non-negative integers")
    if not np.any(y > 0):
        raise DataError("negative binomial response is zero everywhere")
    warnings = []
    if fixed_theta is not None:
        if not fixed_theta > 0:
            raise DataError("theta must be positive")
        beta, mu, dev, iters, trace, ok = _irls(X, y, float(fixed_theta))
        theta = float(fixed_theta)
        traces = [trace]
        ll_trace = [nb_loglik(y, mu, theta)]
        at_bound = False
    else:
        beta, mu, dev, iters, trace, ok = _irls(X, y, math.inf)
        traces = [trace]
        theta = None
        ll_trace = []
        at_bound = False
        ok = False
        for outer in range(1, maxit + 1):
            theta, at_bound = theta_ml(y, mu, theta)
            beta, mu, new_dev, inner, trace, inner_ok = _irls(X, y, theta, beta)
            iters = outer
            traces.append(trace)
            ll_trace.append(nb_loglik(y, mu, theta))
            if not inner_ok:
                warnings.append(f"IRLS did not converge at outer iteration {outer}")
            change = abs(new_dev - dev) / (abs(new_dev) + 0.1)
            dev = new_dev
            if change < tol and inner_ok:
                ok = True
                break
        if at_bound:
            ok = False
            warnings.append(f"dispersion estimate reached its bound (theta={theta:.4g})")
    for w in warnings:
        log.warning(w)
    weights = mu / (1.0 + mu / theta)
    try:
        cov = np.linalg.inv(X.T @ (X * weights[:, None]))
        se = np.sqrt(np.clip(np.diag(cov), 0, None))
    except np.linalg.LinAlgError:
        se = np.full(X.shape[1], np.nan)
    return NbFit(beta=beta, mu=mu, deviance=dev, theta=theta, iterations=iters,
                 converged=ok, loglik=nb_loglik(y, mu, theta), standard_errors=se,
                 names=list(names), theta_at_bound=at_bound, deviance_trace=traces,
                 loglik_trace=ll_trace, warnings=warnings)


def anova_deviance_design(design: DesignMatrix, y, fixed_theta=None,
                          formula_text="") -> AnovaTable:
    full = nb_fit(design.X, y, fixed_theta=fixed_theta, names=design.names)
    theta = full.theta
    n = len(y)
    notes = list(design.diagnostics) + list(full.warnings)
    notes.append(f"theta held at {theta:.6g} for all nested fits")
    prev = nb_fit(design.X[:, [0]], y, fixed_theta=theta)
    null = AnovaRow("NULL", 0, resid_df=n - 1, resid_dev=prev.deviance)
    rows = []
    for k, term in enumerate(design.terms, start=1):
        cols = design.columns_through(k)
        fit = nb_fit(design.X[:, cols], y, fixed_theta=theta)
        df = design.term_df(term)
        dev = max(prev.deviance - fit.deviance, 0.0)
        rows.append(AnovaRow(term_label(term), df, sum_sq=dev, statistic=dev,
                             p=chisq_sf(dev, df), resid_df=n - len(cols),
                             resid_dev=fit.deviance))
        prev = fit
    return AnovaTable("deviance", formula_text, rows, null, n=n,
                      n_excluded=design.n_excluded, notes=notes)


def anova_deviance(records, formula, fixed_theta=None) -> AnovaTable:
    """Sequential analysis of deviance with theta fixed at the full-model value."""
    design, y = encode_design(records, formula)
    return anova_deviance_design(design, y, fixed_theta, str(formula))
