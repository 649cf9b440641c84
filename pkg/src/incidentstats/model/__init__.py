from .design import VARIABLES, DesignMatrix, encode_design, parse_model_formula
from .formula import Formula, parse_formula, render_formula, term_label
from .nb import NbFit, NbParams, anova_deviance, anova_deviance_design, nb_fit, theta_ml
from .ols import AnovaRow, AnovaTable, LinearFit, anova_type1, anova_type1_design, ols_fit, vif
from .select import EliminationStep, drop_one_pvalues, eliminate_insignificant
from .trend import TrendFit, fit_trend, predict_trend, yearly_counts

__all__ = [
    "VARIABLES", "DesignMatrix", "encode_design", "parse_model_formula",
    "Formula", "parse_formula", "render_formula", "term_label",
    "NbFit", "NbParams", "anova_deviance", "anova_deviance_design", "nb_fit", "theta_ml",
    "AnovaRow", "AnovaTable", "LinearFit", "anova_type1", "anova_type1_design", "ols_fit",
    "vif", "EliminationStep", "drop_one_pvalues", "eliminate_insignificant",
    "TrendFit", "fit_trend", "predict_trend", "yearly_counts",
]
