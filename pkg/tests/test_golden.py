"""Structural golden files for the three headline model tables.

Regenerate with ``UPDATE_GOLDEN=1 pytest tests/test_golden.py`` after an
intentional output change.
"""
import os
import re
from pathlib import Path

import pytest

from incidentstats.cli import main
from incidentstats.cli.main import NB_FORMULA, OLS_FORMULA, POST2018_FORMULA

GOLDEN = Path(__file__).parent / "golden"
TABLES = ("incidents", "shooters", "weapons", "victims")
P_CELL = re.compile(r"^(< 2\.2e-16|[0-9.e+-]+)( \*{1,3})?$")

CASES = {
    # name: (argv, produced file, expected headers, closing-row label)
    "all_events_anova": (["fit", "ols", "--formula", OLS_FORMULA], "fit-all-ols_anova.md",
                         ["Variable", "Df", "Sum Sq", "Mean Sq", "F value", "Pr(>F)"],
                         "Residuals"),
    "post2018_anova": (["fit", "ols", "--era", "post2018", "--formula", POST2018_FORMULA],
                       "fit-post2018-ols_anova.md",
                       ["Variable", "Df", "Sum Sq", "Mean Sq", "F value", "Pr(>F)"], "Residuals"),
    "presence_deviance": (["fit", "nb", "--formula", NB_FORMULA], "fit-all-nb_anova.md",
                          ["Variable", "Df", "Deviance", "Resid. Df", "Resid. Dev", "Pr(>Chi)"],
                          "NULL"),
}


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("golden_synth")
    assert main(["synth", "--out", str(out), "--seed", "42"]) == 0
    return out


def _cells(line):
    return [c.strip() for c in line.strip().strip("|").split("|")]


@pytest.mark.parametrize("name", sorted(CASES))
def test_model_table_matches_golden(name, synth_dir, tmp_path):
    argv, produced, headers, closing = CASES[name]
    tables = [a for k in TABLES for a in (f"--{k}", str(synth_dir / f"{k}.csv"))]
    assert main([*argv, *tables, "--out", str(tmp_path)]) == 0
    text = (tmp_path / produced).read_text()
    golden = GOLDEN / f"{name}.md"
    if os.environ.get("UPDATE_GOLDEN"):
        golden.write_text(text)
    lines = [ln for ln in text.splitlines() if ln.startswith("|")]
    assert _cells(lines[0]) == headers
    body = [_cells(ln) for ln in lines[2:]]
    labels = [r[0] for r in body]
    assert closing in labels
    assert labels.index(closing) == (len(labels) - 1 if closing == "Residuals" else 0)
    for row in body:
        if row[0] not in ("Residuals", "NULL"):
            assert P_CELL.match(row[-1]), row
    assert text == golden.read_text()
