"""Least squares fits, sequential (Type I) ANOVA and variance inflation factors."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..errors import DataError, RankDeficientError
from ..stats.special import f_sf
from .design import DesignMatrix, encode_design, prune_dependent
from .formula import term_label


@dataclass
class LinearFit:
    beta: np.ndarray
    residuals: np.ndarray
    fitted: np.ndarray
    rss: float
    tss: float
    df_residual: int
    standard_errors: np.ndarray
    names: List[str]
    effects: np.ndarray = field(repr=False, default=None)

    @property
    def sigma2(self):
        return self.rss / self.df_residual if self.df_residual > 0 else float("nan")

    @property
    def r_squared(self):
        return 1.0 - self.rss / self.tss if self.tss > 0 else float("nan")


def ols_fit(X, y, names: Optional[List[str]] = None) -> LinearFit:
    """Least squares by Householder QR.

    Raises `RankDeficientError` naming the columns that depend linearly on
    earlier ones.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    if names is None:
        names = [f"x{j}" for j in range(p)]
    if n < p:
        raise DataError(f"{n} rows cannot identify {p} coefficients")
    kept = prune_dependent(list(X.T))
    if len(kept) < p:
        raise RankDeficientError([names[j] for j in range(p) if j not in set(kept)])
    Q, R = np.linalg.qr(X)
    effects = Q.T @ y
    beta = np.linalg.solve(R, effects) if p else np.zeros(0)
    fitted = X @ beta
    resid = y - fitted
    rss = float(resid @ resid)
    tss = float(np.sum((y - y.mean()) ** 2))
    df_res = n - p
    if df_res > 0:
        rinv = np.linalg.inv(R)
        se = np.sqrt(rss / df_res * np.sum(rinv ** 2, axis=1))
    else:
        se = np.full(p, np.nan)
    return LinearFit(beta=beta, residuals=resid, fitted=fitted, rss=rss, tss=tss,
                     df_residual=df_res, standard_errors=se, names=list(names),
                     effects=effects)


@dataclass
class AnovaRow:
    term: str
    df: int
    sum_sq: Optional[float] = None
    mean_sq: Optional[float] = None
    statistic: Optional[float] = None
    p: Optional[float] = None
    resid_df: Optional[int] = None
    resid_dev: Optional[float] = None


@dataclass
class AnovaTable:
    kind: str  # "ols" or "deviance"
    formula: str
    rows: List[AnovaRow]
    residual: AnovaRow
    n: int
    n_excluded: int = 0
    notes: List[str] = field(default_factory=list)

    def row(self, term):
        for r in self.rows:
            if r.term == term:
                return r
        raise KeyError(term)

    def to_dict(self):
        return {
            "kind": self.kind, "formula": self.formula, "n": self.n,
            "n_excluded": self.n_excluded, "notes": list(self.notes),
            "rows": [vars(r).copy() for r in self.rows],
            "residual": vars(self.residual).copy(),
        }


def _f_row(term, df, ss, rss, df_res):
    ms = ss / df
    if ms <= 0:
        return AnovaRow(term, df, ss, ms, 0.0, 1.0)
    if rss <= 0:
        return AnovaRow(term, df, ss, ms, math.inf, 0.0)
    f = ms / (rss / df_res)
    return AnovaRow(term, df, ss, ms, f, f_sf(f, df, df_res))


def anova_type1_design(design: DesignMatrix, y, formula_text="") -> AnovaTable:
    fit = ols_fit(design.X, y, design.names)
    if fit.df_residual <= 0:
        raise DataError("no residual degrees of freedom for ANOVA")
    # rounding noise on an exactly explained or constant response counts as zero
    eps = 1e-13 * float(np.dot(y, y))
    rss = fit.rss if fit.rss > eps else 0.0
    rows = []
    for term in design.terms:
        cols = design.term_columns[term]
        ss = float(np.sum(fit.effects[cols] ** 2))
        rows.append(_f_row(term_label(term), len(cols), ss if ss > eps else 0.0, rss,
                           fit.df_residual))
    residual = AnovaRow("Residuals", fit.df_residual, fit.rss, fit.rss / fit.df_residual)
    return AnovaTable("ols", formula_text, rows, residual, n=len(y),
                      n_excluded=design.n_excluded, notes=list(design.diagnostics))


def anova_type1(records, formula) -> AnovaTable:
    """Sequential sums of squares, each term entered after those before it.

    Term sums of squares come from the QR effects of the full design, whose
    columns are ordered as the formula's terms.
    """
    design, y = encode_design(records, formula)
    return anova_type1_design(design, y, str(formula))


def vif(X, names: Optional[List[str]] = None):
    """Variance inflation factor of every non-intercept column.

    Column 0 is taken to be the intercept. Perfectly collinear columns get
    ``math.inf``.
    """
    X = np.asarray(X, dtype=float)
    n, p = X.shape
    if p < 3:
        raise DataError("VIF needs an intercept and at least two predictors")
    if names is None:
        names = [f"x{j}" for j in range(p)]
    out = {}
    for j in range(1, p):
        target = X[:, j]
        others = np.delete(X, j, axis=1)
        coef, *_ = np.linalg.lstsq(others, target, rcond=None)
        resid = target - others @ coef
        rss = float(resid @ resid)
        tss = float(np.sum((target - target.mean()) ** 2))
        if tss == 0 or rss <= 1e-12 * tss:
            out[names[j]] = math.inf
        else:
            out[names[j]] = tss / rss
    return out
