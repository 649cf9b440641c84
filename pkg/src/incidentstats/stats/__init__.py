from .descriptive import Descriptives, describe, median
from .hypothesis import (GofResult, GofRow, PosthocRow, RankTestResult, WelchResult,
                         bonferroni, chi_square_gof, dunn_posthoc, kruskal_wallis, welch_t)
from .shapiro import NormalityResult, shapiro_wilk
from .special import (betainc, chisq_cdf, chisq_sf, f_cdf, f_sf, gammainc_lower,
                      gammainc_upper, normal_cdf, normal_sf, t_cdf, t_ppf, t_sf)

__all__ = [
    "Descriptives", "describe", "median",
    "GofResult", "GofRow", "PosthocRow", "RankTestResult", "WelchResult",
    "bonferroni", "chi_square_gof", "dunn_posthoc", "kruskal_wallis", "welch_t",
    "NormalityResult", "shapiro_wilk",
    "betainc", "chisq_cdf", "chisq_sf", "f_cdf", "f_sf", "gammainc_lower",
    "gammainc_upper", "normal_cdf", "normal_sf", "t_cdf", "t_ppf", "t_sf",
]
