"""Treatment-coded design matrices from analysis records and a formula."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from ..clean import TriState
from ..errors import DataError
from .formula import Formula, Term, parse_formula, term_label

NUMERIC = "numeric"
FACTOR = "factor"


def _tri(attr):
    def get(rec):
        value = getattr(rec, attr)
        return None if value is TriState.MISSING else value.value
    return get


def _attr(attr):
    return lambda rec: getattr(rec, attr)


# formula name -> (kind, getter); getters return None for missing
VARIABLES: Dict[str, Tuple[str, Callable]] = {
    "Casualties": (NUMERIC, _attr("casualties")),
    "Casualty_Present": (NUMERIC, lambda r: int(r.casualties > 0)),
    "Killed": (NUMERIC, _attr("killed")),
    "Wounded": (NUMERIC, _attr("wounded")),
    "Shots_Fired": (NUMERIC, _attr("shots_fired")),
    "Shooter_Age": (NUMERIC, _attr("shooter_age")),
    "Year": (NUMERIC, _attr("year")),
    "Latitude": (NUMERIC, _attr("latitude")),
    "Longitude": (NUMERIC, _attr("longitude")),
    "Month": (FACTOR, lambda r: f"{r.month:02d}"),
    "Shooter_Gender": (FACTOR, _attr("shooter_gender")),
    "Race": (FACTOR, _attr("race")),
    "Weapon_Type": (FACTOR, _attr("weapon_type")),
    "Targets": (FACTOR, _attr("targets")),
    "Location_Type": (FACTOR, _attr("location_type")),
    "During_Classes": (FACTOR, _tri("during_classes")),
    "Accomplice": (FACTOR, _tri("accomplice")),
    "Hostages": (FACTOR, _tri("hostages")),
    "Shooter_Killed": (FACTOR, _tri("shooter_killed")),
    "Gang_Related": (FACTOR, _tri("gang_related")),
    "Bullied": (FACTOR, _tri("bullied")),
    "Domestic_Violence": (FACTOR, _tri("domestic_violence")),
}


def parse_model_formula(text: str) -> Formula:
    return parse_formula(text, VARIABLES)


@dataclass
class DesignMatrix:
    X: np.ndarray
    names: List[str]
    terms: List[Term]
    term_columns: Dict[Term, List[int]]
    row_ids: List[str]
    level_maps: Dict[str, List[str]]
    n_excluded: int = 0
    diagnostics: List[str] = field(default_factory=list)

    @property
    def shape(self):
        return self.X.shape

    def columns_through(self, k: int) -> List[int]:
        """Intercept plus the columns of the first `k` terms."""
        cols = [0]
        for term in self.terms[:k]:
            cols.extend(self.term_columns[term])
        return cols

    def term_df(self, term: Term) -> int:
        return len(self.term_columns[term])


def prune_dependent(columns: Sequence[np.ndarray], rtol: float = 1e-9) -> List[int]:
    """Indices of columns kept by a left-to-right linear independence scan."""
    kept = []
    basis = []
    for j, col in enumerate(columns):
        norm = float(np.linalg.norm(col))
        if norm == 0:
            continue
        r = col.astype(float).copy()
        for _ in range(2):
            for q in basis:
                r -= (q @ r) * q
        rn = float(np.linalg.norm(r))
        if rn > rtol * norm:
            basis.append(r / rn)
            kept.append(j)
    return kept


def encode_design(records, formula, level_order=None):
    """Build the design matrix and response vector for `formula`.

    Rows with a missing value in any used variable are dropped. Factors use
    treatment coding against their lexicographically smallest observed
    level, unless `level_order` supplies an explicit order (first = reference).
    Columns that are zero or linearly dependent on earlier columns are
    pruned; a term left with no columns is dropped from the design.
    """
    if isinstance(formula, str):
        formula = parse_model_formula(formula)
    used = [formula.response] + list(formula.columns)
    for name in used:
        if name not in VARIABLES:
            raise DataError(f"unknown variable {name!r}")
    rows = []
    ids = []
    excluded = 0
    for rec in records:
        vals = [VARIABLES[name][1](rec) for name in used]
        if any(v is None for v in vals):
            excluded += 1
            continue
        rows.append(dict(zip(used, vals)))
        ids.append(rec.id)
    n = len(rows)
    if n == 0:
        raise DataError("no complete-case rows for the model")
    y = np.array([float(r[formula.response]) for r in rows])

    diagnostics = []
    level_maps = {}
    blocks = {}
    for name in formula.columns:
        kind = VARIABLES[name][0]
        if kind == NUMERIC:
            blocks[name] = ([name], [np.array([float(r[name]) for r in rows])])
            continue
        observed = sorted({r[name] for r in rows})
        if level_order and name in level_order:
            order = [lv for lv in level_order[name] if lv in observed]
            order += [lv for lv in observed if lv not in order]
        else:
            order = observed
        level_maps[name] = order
        values = [r[name] for r in rows]
        blocks[name] = ([f"{name}[{lv}]" for lv in order[1:]],
                        [np.array([1.0 if v == lv else 0.0 for v in values]) for lv in order[1:]])

    cand_names = ["(Intercept)"]
    cand_cols = [np.ones(n)]
    cand_term = [None]
    for term in formula.terms:
        if any(VARIABLES[c][0] == FACTOR and len(level_maps[c]) < 2 for c in term):
            diagnostics.append(f"term {term_label(term)} dropped: a factor has fewer "
                               "than 2 observed levels")
            continue
        parts = [list(zip(*blocks[c])) for c in term]
        for combo in product(*parts):
            label = ":".join(p[0] for p in combo)
            col = np.ones(n)
            for p in combo:
                col = col * p[1]
            cand_names.append(label)
            cand_cols.append(col)
            cand_term.append(term)

    kept = prune_dependent(cand_cols)
    if 0 not in kept:
        raise DataError("empty design")
    dropped = [cand_names[j] for j in range(len(cand_names)) if j not in set(kept)]
    if dropped:
        diagnostics.append("aliased or empty columns pruned: " + ", ".join(dropped))
    names = [cand_names[j] for j in kept]
    X = np.column_stack([cand_cols[j] for j in kept])
    term_columns = {}
    terms = []
    for term in formula.terms:
        idx = [i for i, j in enumerate(kept) if cand_term[j] == term]
        if idx:
            term_columns[term] = idx
            terms.append(term)
        elif not any(d.startswith(f"term {term_label(term)} ") for d in diagnostics):
            diagnostics.append(f"term {term_label(term)} dropped: no estimable columns")
    design = DesignMatrix(X=X, names=names, terms=terms, term_columns=term_columns,
                          row_ids=ids, level_maps=level_maps, n_excluded=excluded,
                          diagnostics=diagnostics)
    return design, y
