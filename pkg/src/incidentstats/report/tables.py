"""Plain-text tables (markdown or CSV) for every analysis result."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

P_FLOOR = 2.2e-16


@dataclass
class TableDoc:
    title: str
    headers: List[str]
    rows: List[List[str]]
    notes: List[str] = field(default_factory=list)

    def __post_init__(self):
        width = len(self.headers)
        for row in self.rows:
            if len(row) != width:
                raise ValueError(f"row {row!r} has {len(row)} cells, expected {width}")


def stars(p: Optional[float]) -> str:
    if p is None or (isinstance(p, float) and math.isnan(p)):
        return ""
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""


def fmt_num(x, digits: int = 4) -> str:
    if x is None:
        return ""
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "NA"
    if math.isinf(x):
        return "Inf" if x > 0 else "-Inf"
    if x == 0:
        return "0"
    return f"{x:.{digits}g}"


def fmt_p(p: Optional[float], with_stars: bool = True) -> str:
    if p is None:
        return ""
    text = "< 2.2e-16" if p < P_FLOOR else fmt_num(p)
    mark = stars(p) if with_stars else ""
    return f"{text} {mark}" if mark else text


def _md_cell(text):
    return str(text).replace("|", "\\|")


def render_table(doc: TableDoc, fmt: str = "markdown") -> str:
    if fmt in ("markdown", "md"):
        lines = []
        if doc.title:
            lines += [f"### {doc.title}", ""]
        lines.append("| " + " | ".join(_md_cell(h) for h in doc.headers) + " |")
        lines.append("|" + "|".join("---" for _ in doc.headers) + "|")
        for row in doc.rows:
            lines.append("| " + " | ".join(_md_cell(c) for c in row) + " |")
        if doc.notes:
            lines.append("")
            lines += [f"- {n}" for n in doc.notes]
        return "\n".join(lines) + "\n"
    if fmt == "csv":
        buf = io.StringIO(newline="")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(doc.headers)
        writer.writerows(doc.rows)
        return buf.getvalue()
    raise ValueError(f"unknown table format {fmt!r}")


# builders ------------------------------------------------------------------

def anova_doc(table, title: str) -> TableDoc:
    if table.kind == "ols":
        headers = ["Variable", "Df", "Sum Sq", "Mean Sq", "F value", "Pr(>F)"]
        rows = [[r.term, str(r.df), fmt_num(r.sum_sq), fmt_num(r.mean_sq),
                 fmt_num(r.statistic), fmt_p(r.p)] for r in table.rows]
        res = table.residual
        rows.append(["Residuals", str(res.df), fmt_num(res.sum_sq), fmt_num(res.mean_sq), "", ""])
    else:
        headers = ["Variable", "Df", "Deviance", "Resid. Df", "Resid. Dev", "Pr(>Chi)"]
        null = table.residual
        rows = [["NULL", "", "", str(null.resid_df), fmt_num(null.resid_dev), ""]]
        rows += [[r.term, str(r.df), fmt_num(r.statistic), str(r.resid_df),
                  fmt_num(r.resid_dev), fmt_p(r.p)] for r in table.rows]
    notes = [f"formula: {table.formula}", f"rows used: {table.n}; rows excluded "
             f"(incomplete cases): {table.n_excluded}"] + list(table.notes)
    return TableDoc(title, headers, rows, notes)


def gof_doc(result, title: str = "Chi-square goodness of fit") -> TableDoc:
    rows = [[r.label, fmt_num(r.observed), fmt_num(r.expected, 7), f"{r.pearson_residual:.2f}",
             r.direction] for r in result.rows]
    p_text = fmt_p(result.p, False)
    p_text = p_text if p_text.startswith("<") else f"= {p_text}"
    notes = [f"chi-square = {result.chi2:.2f}, df = {result.df}, p-value {p_text}",
             "residuals are Pearson residuals (O - E) / sqrt(E)"]
    return TableDoc(title, ["Category", "Observed", "Expected", "Pearson Residual", "Higher/Lower"],
                    rows, notes)


def descriptives_doc(named: Sequence, title: str, digits: int = 4) -> TableDoc:
    """One column per (name, Descriptives) pair."""
    headers = ["Statistic"] + [name for name, _ in named]
    stats = [("N", "n"), ("Mean", "mean"), ("Median", "median"), ("Mode", "mode"),
             ("Standard Deviation", "sd"), ("Minimum", "min"), ("Maximum", "max"),
             ("NA Count", "missing_count")]
    rows = []
    for label, attr in stats:
        rows.append([label] + [fmt_num(getattr(d, attr), digits) if attr not in ("n", "missing_count")
                               else str(getattr(d, attr)) for _, d in named])
    return TableDoc(title, headers, rows)


def counts_doc(counts: Sequence, title: str, label: str = "Category") -> TableDoc:
    total = sum(c for _, c in counts)
    rows = [[str(k), str(c), f"{100.0 * c / total:.2f}" if total else ""] for k, c in counts]
    return TableDoc(title, [label, "Count", "Percentage (%)"], rows)


def welch_doc(result, title="Welch two-sample t-test") -> TableDoc:
    rows = [["t-value", f"{result.t:.4f}"], ["Degrees of freedom (df)", f"{result.df:.2f}"],
            ["p-value", fmt_p(result.p, False)],
            ["95% Confidence Interval Lower Bound", fmt_num(result.ci_low, 7)],
            ["95% Confidence Interval Upper Bound", fmt_num(result.ci_high, 7)],
            ["Mean of group x", fmt_num(result.mean_x, 7)],
            ["Mean of group y", fmt_num(result.mean_y, 7)]]
    return TableDoc(title, ["Metric", "Value"], rows)


def kruskal_doc(result, title="Kruskal-Wallis rank sum test") -> TableDoc:
    return TableDoc(title, ["Statistic", "Value"],
                    [["H (tie-corrected)", fmt_num(result.H)], ["df", str(result.df)],
                     ["p-value", fmt_p(result.p)]])


def dunn_doc(rows, title="Dunn's post-hoc test (Bonferroni)") -> TableDoc:
    body = [[f"{r.group_a} - {r.group_b}", f"{r.z:.2f}", fmt_num(r.p_unadj, 3),
             fmt_num(r.p_adj, 3)] for r in rows]
    return TableDoc(title, ["Comparison", "Z value", "P.unadj.", "P.adj"], body)


def shapiro_doc(result, title="Shapiro-Wilk normality test") -> TableDoc:
    p = "< 0.0001" if result.p < 1e-4 else fmt_num(result.p)
    return TableDoc(title, ["Test", "Result"],
                    [["Shapiro-Wilk Test Stat", f"{result.W:.4f}"], ["P-value", p],
                     ["n", str(result.n)]])


def coefficient_doc(names, estimates, ses, title="Coefficients") -> TableDoc:
    rows = [[n, fmt_num(e), fmt_num(s)] for n, e, s in zip(names, estimates, ses)]
    return TableDoc(title, ["Term", "Estimate", "Std. Error"], rows)
