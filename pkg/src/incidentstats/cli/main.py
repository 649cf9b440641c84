"""Batch command line: ``incidentstats <command> [options]``.

Exit status: 0 success, 2 usage error, 3 data error, 4 numerical
non-convergence. Every command builds all of its outputs in memory and
writes them only once the whole computation has succeeded.
"""
from __future__ import annotations

import argparse
import logging
import sys
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from .. import __version__
from ..clean import (Era, TRISTATE_FIELDS, TriState, build_analysis_table,
                     compute_age_policy, raw_numeric_ages, read_clean_table, shooter_age_na_count,
                     split_era, victim_breakdown, write_clean_table)
from ..errors import (ConvergenceError, DataError, FormulaError, IncidentStatsError,
                      SchemaError)
from ..ingest import TableKind, join_by_incident, load_tables, parse_table
from ..model import (anova_deviance_design, anova_type1_design, eliminate_insignificant,
                     encode_design, fit_trend, nb_fit, ols_fit, parse_model_formula,
                     predict_trend, vif, yearly_counts)
from ..report import (CoefPlotSpec, TableDoc, anova_doc, bin_density, coefficient_doc,
                      counts_doc, descriptives_doc, dunn_doc, fmt_num, gof_doc, kruskal_doc,
                      plot_coefficients, plot_density, plot_histogram, plot_scatter_with_fits,
                      render_table, shapiro_doc, welch_doc)
from ..stats import (chi_square_gof, describe, dunn_posthoc, kruskal_wallis, shapiro_wilk,
                     welch_t)
from .manifest import render_manifest, sha256, write_outputs
from .synth import SynthSpec, generate_synthetic

log = logging.getLogger("incidentstats")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NONCONVERGENCE = 0, 2, 3, 4

OLS_FORMULA = ("Casualties ~ Shooter_Gender + Weapon_Type + Targets + Accomplice + Bullied"
               " + Shots_Fired")
POST2018_FORMULA = ("Casualties ~ Shooter_Age + Weapon_Type + Race + During_Classes + Targets"
                    " + Accomplice + Gang_Related + Shots_Fired")
INTERACTION_FORMULA = "Casualties ~ Targets*Weapon_Type*Shots_Fired"
NB_FORMULA = "Casualty_Present ~ Shooter_Age + Targets"
MONTHS = ("January", "February", "March", "April", "May", "June", "July", "August",
          "September", "October", "November", "December")
TARGETED = ("victims targeted", "both")
UNTARGETED = ("random shooting", "neither")


class UsageError(IncidentStatsError):
    pass


@dataclass
class RunConfig:
    command: str
    action: Optional[str] = None
    incidents: Optional[Path] = None
    shooters: Optional[Path] = None
    weapons: Optional[Path] = None
    victims: Optional[Path] = None
    clean_table: Optional[Path] = None
    counts: Optional[Path] = None
    monthly_fixture: bool = False
    out: Path = Path("out")
    era: str = "all"
    formula: Optional[str] = None
    alpha: float = 0.05
    seed: int = 42
    format: str = "md"
    eliminate: bool = False
    theta: Optional[float] = None
    n: int = 2584
    beta: tuple = (0.5, 0.8, -0.3)
    mess_rate: float = 0.05

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise UsageError("--alpha must lie in (0, 1)")
        Era(self.era)


@dataclass
class Dataset:
    records: list
    all_records: list
    joined: object = None
    diagnostics: list = field(default_factory=list)
    inputs: Dict[str, bytes] = field(default_factory=dict)


class Run:
    """Collects the files one command will emit."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.files: Dict[str, bytes] = {}
        self.entries: List[tuple] = [("command", cfg.command)]
        if cfg.action:
            self.entries.append(("action", cfg.action))
        self.entries += [("version", __version__), ("era", cfg.era), ("alpha", cfg.alpha),
                         ("seed", cfg.seed), ("format", cfg.format)]

    @property
    def prefix(self):
        return f"{self.cfg.command}-{self.cfg.era}"

    def _name(self, label, ext):
        # subcommand actions share one directory, so their labels carry the action
        action = self.cfg.action
        if action and not label.startswith(action):
            label = f"{action}_{label}"
        return f"{self.prefix}-{label}.{ext}"

    def note(self, key, value):
        self.entries.append((key, value))

    def table(self, label: str, doc: TableDoc):
        ext = "csv" if self.cfg.format == "csv" else "md"
        fmt = "csv" if ext == "csv" else "markdown"
        self.files[self._name(label, ext)] = render_table(doc, fmt).encode("utf-8")

    def text(self, label: str, ext: str, content):
        data = content if isinstance(content, bytes) else content.encode("utf-8")
        self.files[self._name(label, ext)] = data

    def finish(self):
        manifest = render_manifest(self.entries, self.files)
        self.files[self._name("manifest", "txt")] = manifest
        write_outputs(self.cfg.out, self.files)
        for name in sorted(self.files):
            log.info("wrote %s", self.cfg.out / name)


# data loading ----------------------------------------------------------------

def _read(path: Path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def load_dataset(cfg: RunConfig, run: Run) -> Dataset:
    inputs = {}
    if cfg.clean_table:
        data = _read(cfg.clean_table)
        inputs["clean_table"] = data
        records = read_clean_table(data)
        joined, diags = None, []
    elif cfg.incidents:
        raw = {kind: (_read(p) if p else b"") for kind, p in (
            (TableKind.INCIDENTS, cfg.incidents), (TableKind.SHOOTERS, cfg.shooters),
            (TableKind.WEAPONS, cfg.weapons), (TableKind.VICTIMS, cfg.victims))}
        inputs.update({k.value: v for k, v in raw.items() if v})
        joined = load_tables(*raw.values())
        diags = list(joined.diagnostics)
        records = []
        if joined.entries:
            records, more = build_analysis_table(joined)
            diags += more
    else:
        raise UsageError("no input: give --clean-table or --incidents (plus optional "
                         "--shooters/--weapons/--victims)")
    for name, data in sorted(inputs.items()):
        run.note(f"input.{name}.sha256", sha256(data))
    era_records = split_era(records, cfg.era)
    run.note("records_total", len(records))
    run.note("records_era", len(era_records))
    run.note("diagnostics", len(diags))
    return Dataset(era_records, records, joined, diags, inputs)


def _monthly_counts(cfg: RunConfig):
    if cfg.counts:
        text = _read(cfg.counts).decode("utf-8-sig")
    else:
        text = resources.files("incidentstats.data").joinpath("monthly_counts.csv").read_text()
    labels, counts = [], []
    for k, line in enumerate(text.strip().splitlines()[1:], start=1):
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise DataError(f"counts file line {k + 1}: expected 'label,count'")
        try:
            counts.append(int(parts[1]))
        except ValueError:
            raise DataError(f"counts file line {k + 1}: count {parts[1]!r} is not an integer")
        labels.append(parts[0])
    if len(counts) < 2:
        raise DataError("counts file needs at least two categories")
    return labels, counts


def _uses_counts(cfg):
    return bool(cfg.counts or cfg.monthly_fixture)


def _records_months(records):
    c = Counter(r.month for r in records)
    return list(MONTHS), [c.get(m, 0) for m in range(1, 13)]


# commands ----------------------------------------------------------------------

def cmd_ingest(cfg: RunConfig, run: Run):
    if not cfg.incidents:
        raise UsageError("ingest needs --incidents")
    summary = []
    parsed, diags = {}, []
    for kind, path in ((TableKind.INCIDENTS, cfg.incidents), (TableKind.SHOOTERS, cfg.shooters),
                       (TableKind.WEAPONS, cfg.weapons), (TableKind.VICTIMS, cfg.victims)):
        if not path:
            parsed[kind] = []
            continue
        data = _read(path)
        run.note(f"input.{kind.value}.sha256", sha256(data))
        rows, d = parse_table(data, kind)
        parsed[kind] = rows
        diags += d
        bad = len({x.row for x in d})
        summary.append([kind.value, str(len(rows) + bad), str(len(rows)), str(bad)])
    joined = join_by_incident(parsed[TableKind.INCIDENTS], parsed[TableKind.SHOOTERS],
                              parsed[TableKind.WEAPONS], parsed[TableKind.VICTIMS])
    diags += joined.diagnostics
    run.note("incidents_joined", len(joined.entries))
    run.note("diagnostics", len(diags))
    doc = TableDoc("Ingest summary", ["Table", "Data rows", "Parsed", "Diagnosed"], summary,
                   [f"unique incidents after join: {len(joined.entries)}",
                    f"join anomalies (duplicates, orphans): {len(joined.diagnostics)}"])
    run.table("summary", doc)
    run.text("diagnostics", "txt", "table\trow\tcolumn\treason\n"
             + "".join(f"{d}\n" for d in diags))


def cmd_clean(cfg: RunConfig, run: Run):
    ds = load_dataset(cfg, run)
    run.text("analysis", "csv", write_clean_table(ds.records))
    run.text("diagnostics", "txt", "".join(f"{d}\n" for d in ds.diagnostics))
    if ds.joined is not None and ds.joined.entries:
        try:
            p = compute_age_policy(s for b in ds.joined.entries.values() for s in b.shooters)
            run.table("age_policy", TableDoc("Shooter age imputation medians", ["Stratum", "Median"], [
                ["overall (blank)", fmt_num(p.overall_median)], ["child (<= 12)", fmt_num(p.child_median)],
                ["teen (13-17)", fmt_num(p.teen_median)], ["adult (>= 18)", fmt_num(p.adult_median)]]))
        except DataError:
            pass


def _monthly_docs(run, labels, counts):
    rows = [[lab, str(c)] for lab, c in zip(labels, counts)]
    run.table("monthly", TableDoc("Incidents per month", ["Month", "Occurrences"], rows))
    d = describe(counts)
    run.table("monthly_summary", TableDoc("Summary statistics of monthly counts",
                                          ["Statistic", "Value"],
                                          [["Mean", f"{d.mean:.2f}"], ["Median", f"{d.median:.2f}"],
                                           ["Standard Deviation", f"{d.sd:.2f}"],
                                           ["Minimum", fmt_num(d.min)], ["Maximum", fmt_num(d.max)]]))


def cmd_describe(cfg: RunConfig, run: Run):
    if _uses_counts(cfg):
        labels, counts = _monthly_counts(cfg)
        _monthly_docs(run, labels, counts)
        return
    ds = load_dataset(cfg, run)
    if not ds.records:
        raise DataError("no records to describe")
    _monthly_docs(run, *_records_months(ds.records))
    run.table("casualties", descriptives_doc(
        [("Killed", describe([r.killed for r in ds.records])),
         ("Wounded", describe([r.wounded for r in ds.records]))],
        "Summary statistics of victims"))
    if ds.joined is not None:
        ages = raw_numeric_ages(ds.joined)
        na = shooter_age_na_count(ds.joined)
        shooters = [s for b in ds.joined.entries.values() for s in b.shooters]
        genders = Counter((s.gender_raw or "unknown") for s in shooters)
        races = Counter(s.race_raw for s in shooters if s.race_raw and s.race_raw != "unknown")
        source = "raw shooter rows (before imputation)"
    else:
        ages = [r.shooter_age for r in ds.records]
        na = 0
        genders = Counter(r.shooter_gender for r in ds.records)
        races = Counter(r.race for r in ds.records if r.race)
        source = "cleaned records (after imputation)"
    if ages:
        d = describe(ages)
        doc = descriptives_doc([("Shooter age", d)], "Summary statistics for age")
        doc.rows[-1][1] = str(na)
        doc.notes.append(f"computed on {source}")
        run.table("age", doc)
    run.table("gender", counts_doc(sorted(genders.items(), key=lambda kv: (-kv[1], kv[0])),
                                   "Shooter gender breakdown", "Gender"))
    run.table("race", counts_doc(sorted(races.items(), key=lambda kv: (-kv[1], kv[0])),
                                 "Shooter race breakdown (excluding unknown)", "Race"))
    for label, attr, title in (("weapon", "weapon_type", "Weapon type"),
                               ("targets", "targets", "Targets"),
                               ("location", "location_type", "Location type")):
        c = Counter(getattr(r, attr) for r in ds.records if getattr(r, attr) is not None)
        run.table(label, counts_doc(sorted(c.items()), title, title))
    rows = []
    for attr in TRISTATE_FIELDS:
        vals = [getattr(r, attr) for r in ds.records if getattr(r, attr) is not TriState.MISSING]
        if vals:
            yes = 100.0 * sum(v is TriState.YES for v in vals) / len(vals)
            rows.append([attr.title(), f"{yes:.4f}", f"{100 - yes:.4f}"])
    run.table("yes_no", TableDoc("Yes/no event and shooter details", ["Category", "Yes (%)", "No (%)"],
                                 rows))
    if ds.joined is not None:
        vb = victim_breakdown(ds.joined)
        rows = [[attr, k, f"{pct:.2f}"] for attr, items in vb.items() for k, pct in items]
        run.table("victims", TableDoc("Victim breakdown", ["Attribute", "Category", "%"], rows))


def _weapon_groups(records):
    groups = {}
    for r in records:
        groups.setdefault(r.weapon_type, []).append(r.casualties)
    labels = sorted(groups)
    return labels, [groups[k] for k in labels]


def cmd_test(cfg: RunConfig, run: Run):
    action = cfg.action
    if action == "chisq":
        if _uses_counts(cfg):
            labels, counts = _monthly_counts(cfg)
        else:
            labels, counts = _records_months(load_dataset(cfg, run).records)
        res = chi_square_gof(counts, labels=labels)
        run.note("chi2", f"{res.chi2:.6f}")
        run.table("chisq", gof_doc(res, "Monthly incident counts against a uniform split"))
        return
    ds = load_dataset(cfg, run)
    if action == "shapiro":
        ages = raw_numeric_ages(ds.joined) if ds.joined is not None else [
            r.shooter_age for r in ds.records]
        res = shapiro_wilk(ages)
        run.table("shapiro", shapiro_doc(res, "Normality test for shooter ages"))
    elif action == "welch":
        x = [r.casualties for r in ds.records if r.targets in TARGETED]
        y = [r.casualties for r in ds.records if r.targets in UNTARGETED]
        res = welch_t(x, y)
        doc = welch_doc(res, "Welch t-test: casualties, targeted (x) vs not targeted (y)")
        doc.notes.append(f"x = targets in {TARGETED} (n={len(x)}); "
                         f"y = targets in {UNTARGETED} (n={len(y)})")
        run.table("welch", doc)
    elif action in ("kw", "dunn"):
        labels, groups = _weapon_groups(ds.records)
        if action == "kw":
            res = kruskal_wallis(groups)
            doc = kruskal_doc(res, "Kruskal-Wallis: casualties by weapon type")
            doc.notes.append("groups: " + ", ".join(f"{k} (n={len(g)})" for k, g in zip(labels, groups)))
            run.table("kw", doc)
        else:
            rows = dunn_posthoc(groups, labels)
            run.table("dunn", dunn_doc(rows, "Dunn's post-hoc: casualties by weapon type"))
    else:
        raise UsageError(f"unknown test {action!r}")


def _formula(cfg, default):
    return parse_model_formula(cfg.formula or default)


def cmd_fit(cfg: RunConfig, run: Run):
    ds = load_dataset(cfg, run)
    action = cfg.action
    if action == "trend":
        points = yearly_counts(ds.records)
        lin = fit_trend(points, "linear")
        exp = fit_trend(points, "exponential")
        t_next = points[-1][0] + 1
        rows = [["linear", f"slope={lin.params[0]:.6g}, intercept={lin.params[1]:.6g}",
                 fmt_num(lin.rss), fmt_num(predict_trend(lin, t_next))],
                ["exponential", f"a={exp.params[0]:.6g}, b={exp.params[1]:.6g}, c={exp.params[2]:.6g}",
                 fmt_num(exp.rss), fmt_num(predict_trend(exp, t_next))]]
        run.table("trend", TableDoc("Incidents per year: trend fits",
                                    ["Model", "Parameters", "RSS", f"Prediction t={t_next}"], rows,
                                    ["t = years since 1966; exponential model y = a + b*exp(c*t)"]))
        run.text("trend", "svg", plot_scatter_with_fits(points, [lin, exp]))
        return
    if action not in ("ols", "nb"):
        raise UsageError(f"unknown model {action!r}")
    formula = _formula(cfg, OLS_FORMULA if action == "ols" else NB_FORMULA)
    if cfg.eliminate:
        formula, trail = eliminate_insignificant(ds.records, formula, cfg.alpha, kind=action,
                                                 fixed_theta=cfg.theta)
        run.table("elimination", TableDoc(
            "Backward elimination", ["Step", "Dropped term", "p-value", "Remaining formula"],
            [[str(s.step), s.term, fmt_num(s.p), s.formula] for s in trail],
            [f"alpha = {cfg.alpha}", f"final formula: {formula}"]))
    run.note("formula", str(formula))
    design, y = encode_design(ds.records, formula)
    run.note("rows_used", len(y))
    run.note("rows_excluded", design.n_excluded)
    if action == "ols":
        table = anova_type1_design(design, y, str(formula))
        fit = ols_fit(design.X, y, design.names)
        run.table("anova", anova_doc(table, "ANOVA table"))
        run.table("coefficients", coefficient_doc(design.names, fit.beta, fit.standard_errors,
                                                  "Linear model coefficients"))
        if design.X.shape[1] >= 3:
            v = vif(design.X, design.names)
            run.table("vif", TableDoc("Variance inflation factors", ["Column", "VIF"],
                                      [[k, fmt_num(x)] for k, x in v.items()]))
        run.text("coefficients", "svg", plot_coefficients(
            CoefPlotSpec.from_fit(design.names, fit.beta, fit.standard_errors)))
    else:
        fit = nb_fit(design.X, y, fixed_theta=cfg.theta, names=design.names)
        if not fit.converged and not fit.theta_at_bound:
            raise ConvergenceError("negative binomial fit did not converge", best=fit)
        table = anova_deviance_design(design, y, fit.theta, str(formula))
        table.notes[:0] = fit.warnings
        run.note("theta", f"{fit.theta:.6g}")
        run.note("converged", fit.converged)
        run.table("anova", anova_doc(table, "Analysis of deviance"))
        doc = coefficient_doc(design.names, fit.beta, fit.standard_errors,
                              "Negative binomial coefficients (log link)")
        doc.notes += [f"theta = {fit.theta:.6g} (alpha = {fit.alpha:.6g})",
                      f"residual deviance = {fit.deviance:.6g} on {len(y) - design.X.shape[1]} df"]
        doc.notes += fit.warnings
        run.table("coefficients", doc)


def cmd_report(cfg: RunConfig, run: Run):
    ds = load_dataset(cfg, run)
    if not ds.records:
        raise DataError("no records to report")
    ages = raw_numeric_ages(ds.joined) if ds.joined is not None else [r.shooter_age for r in ds.records]
    if ages:
        run.text("age_histogram", "svg", plot_histogram(ages, 1.0, "Histogram of shooter ages",
                                                         "age (years)"))
    points = yearly_counts(ds.records)
    fits = [fit_trend(points, "linear")]
    try:
        fits.append(fit_trend(points, "exponential"))
    except (ConvergenceError, DataError) as exc:
        log.warning("exponential trend omitted: %s", exc)
    run.text("yearly", "svg", plot_scatter_with_fits(points, fits))
    formula = _formula(cfg, OLS_FORMULA)
    design, y = encode_design(ds.records, formula)
    fit = ols_fit(design.X, y, design.names)
    run.text("coefficients", "svg", plot_coefficients(
        CoefPlotSpec.from_fit(design.names, fit.beta, fit.standard_errors)))
    grid = bin_density(ds.records)
    run.note("density_in_bounds", grid.total)
    run.note("density_out_of_bounds", grid.out_of_bounds)
    run.text("density", "svg", plot_density(grid, f"Incident density ({cfg.era})"))


def cmd_synth(cfg: RunConfig, run: Run):
    spec = SynthSpec(n_incidents=cfg.n, beta=tuple(cfg.beta), theta=cfg.theta,
                     mess_rate=cfg.mess_rate)
    try:
        spec.validate()
    except DataError as exc:
        raise UsageError(str(exc)) from None
    tables = generate_synthetic(spec, cfg.seed)
    run.note("n", spec.n_incidents)
    run.note("beta", ",".join(repr(b) for b in spec.beta))
    run.note("theta", spec.theta)
    run.note("mess_rate", spec.mess_rate)
    run.files.update(tables)


COMMANDS = {"ingest": cmd_ingest, "clean": cmd_clean, "describe": cmd_describe,
            "test": cmd_test, "fit": cmd_fit, "report": cmd_report, "synth": cmd_synth}


def _beta(text):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated numbers") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--incidents", type=Path)
    common.add_argument("--shooters", type=Path)
    common.add_argument("--weapons", type=Path)
    common.add_argument("--victims", type=Path)
    common.add_argument("--clean-table", type=Path)
    common.add_argument("--out", type=Path, required=True, help="output directory")
    common.add_argument("--era", choices=[e.value for e in Era], default="all")
    common.add_argument("--formula")
    common.add_argument("--alpha", type=float, default=0.05)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--format", choices=["md", "csv"], default="md")
    common.add_argument("--counts", type=Path, help="label,count CSV for monthly statistics")
    common.add_argument("--monthly-fixture", action="store_true",
                        help="use the bundled monthly incident counts")

    parser = argparse.ArgumentParser(prog="incidentstats", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("ingest", parents=[common], help="parse and join the four tables")
    sub.add_parser("clean", parents=[common], help="emit the cleaned analysis table")
    sub.add_parser("describe", parents=[common], help="descriptive tables")
    p = sub.add_parser("test", parents=[common], help="hypothesis tests")
    p.add_argument("action", choices=["chisq", "shapiro", "welch", "kw", "dunn"])
    p = sub.add_parser("fit", parents=[common], help="model fits")
    p.add_argument("action", choices=["ols", "nb", "trend"])
    p.add_argument("--eliminate", action="store_true", help="backward-eliminate terms first")
    p.add_argument("--theta", type=float, help="fix the negative binomial theta")
    sub.add_parser("report", parents=[common], help="figures")
    p = sub.add_parser("synth", parents=[common], help="generate a synthetic dataset")
    p.add_argument("--n", type=int, default=2584)
    p.add_argument("--theta", type=float, default=1.5)
    p.add_argument("--beta", type=_beta, default=(0.5, 0.8, -0.3))
    p.add_argument("--mess-rate", type=float, default=0.05)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    opts = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    try:
        cfg = RunConfig(**opts)
        run = Run(cfg)
        if cfg.formula:
            run.note("formula_arg", cfg.formula)
        COMMANDS[cfg.command](cfg, run)
        run.finish()
    except (UsageError, FormulaError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (DataError, SchemaError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK
