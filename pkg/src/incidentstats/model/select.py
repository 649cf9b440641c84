"""Backward elimination of insignificant terms."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..stats.special import chisq_sf, f_sf
from .design import encode_design, parse_model_formula
from .formula import Formula, Term, term_label
from .nb import nb_fit
from .ols import ols_fit


@dataclass(frozen=True)
class EliminationStep:
    step: int
    term: str
    p: float
    formula: str


def _candidates(terms: List[Term]) -> List[Term]:
    """Terms not contained in any other remaining term."""
    out = []
    for t in terms:
        if not any(o != t and set(t) < set(o) for o in terms):
            out.append(t)
    return out


def drop_one_pvalues(records, formula: Formula, kind: str = "ols",
                     fixed_theta: Optional[float] = None):
    """p-value of removing each removable term from the full model.

    OLS uses the partial F test; NB uses the likelihood-ratio deviance test
    with theta held at the full-model estimate. Both are evaluated on the
    complete-case rows of the full model.
    """
    design, y = encode_design(records, formula)
    all_cols = list(range(design.X.shape[1]))
    out = {}
    if kind == "ols":
        full = ols_fit(design.X, y, design.names)
        for term in _candidates(design.terms):
            cols = [c for c in all_cols if c not in design.term_columns[term]]
            reduced = ols_fit(design.X[:, cols], y)
            df = design.term_df(term)
            if full.rss <= 0:
                out[term] = 0.0 if reduced.rss > full.rss else 1.0
                continue
            f = ((reduced.rss - full.rss) / df) / (full.rss / full.df_residual)
            out[term] = f_sf(max(f, 0.0), df, full.df_residual)
    elif kind == "nb":
        full = nb_fit(design.X, y, fixed_theta=fixed_theta, names=design.names)
        for term in _candidates(design.terms):
            cols = [c for c in all_cols if c not in design.term_columns[term]]
            reduced = nb_fit(design.X[:, cols], y, fixed_theta=full.theta)
            out[term] = chisq_sf(max(reduced.deviance - full.deviance, 0.0),
                                 design.term_df(term))
    else:
        raise ValueError(f"unknown model kind {kind!r}")
    # terms that lost all their columns carry no information
    for term in formula.terms:
        if term not in design.term_columns and term in _candidates(list(formula.terms)):
            out[term] = 1.0
    return out


def eliminate_insignificant(records, formula, alpha: float = 0.05, kind: str = "ols",
                            fixed_theta: Optional[float] = None
                            ) -> Tuple[Formula, List[EliminationStep]]:
    """Drop the least significant removable term until every p <= alpha.

    A main effect is never removed while an interaction containing it
    remains. Stops when one term is left.
    """
    if isinstance(formula, str):
        formula = parse_model_formula(formula)
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    trail = []
    step = 0
    while len(formula.terms) > 1:
        pvals = drop_one_pvalues(records, formula, kind, fixed_theta)
        if not pvals:
            break
        order = list(formula.terms)
        worst = max(pvals, key=lambda t: (pvals[t], order.index(t)))
        if not pvals[worst] > alpha:
            break
        step += 1
        formula = formula.without(worst)
        trail.append(EliminationStep(step, term_label(worst), float(pvals[worst]),
                                     str(formula)))
    return formula, trail
