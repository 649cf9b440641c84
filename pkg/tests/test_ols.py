import math

import numpy as np
import pytest

from conftest import make_record
from helpers import nested_ss, normal_equations, random_formula, random_records
from incidentstats.clean import TriState
from incidentstats.errors import DataError, RankDeficientError
from incidentstats.model import anova_type1, anova_type1_design, encode_design, ols_fit, vif
from incidentstats.model.design import prune_dependent


def test_factor_coding(synth_records):
    design, y = encode_design(synth_records, "Casualties ~ Targets")
    assert design.level_maps["Targets"][0] == "both"
    assert design.names == ["(Intercept)", "Targets[neither]", "Targets[random shooting]",
                            "Targets[victims targeted]"]
    assert design.n_excluded == sum(r.targets is None for r in synth_records)
    assert len(y) == len(design.row_ids)


def test_complete_case_exclusion():
    recs = [make_record(id=str(i), bullied=TriState.YES if i % 2 else TriState.NO)
            for i in range(10)]
    recs[3] = make_record(id="3", bullied=TriState.MISSING)
    design, y = encode_design(recs, "Casualties ~ Bullied")
    assert len(y) == 9 and design.n_excluded == 1 and "3" not in design.row_ids


def test_interaction_columns_and_unobserved_combination():
    recs = []
    for i, (t, w) in enumerate([(t, w) for t in "abcd" for w in "pqr"] * 2):
        if (t, w) == ("d", "r"):
            continue
        recs.append(make_record(id=str(i), targets=t, weapon_type=w, wounded=i % 5))
    design, _ = encode_design(recs, "Casualties ~ Targets*Weapon_Type")
    inter = [n for n in design.names if ":" in n]
    # 3 x 2 = 6 candidate product columns, one combination never observed
    assert len(inter) == 5
    assert any("pruned" in d for d in design.diagnostics)


def test_single_level_factor_dropped():
    recs = [make_record(id=str(i), wounded=i) for i in range(5)]
    design, _ = encode_design(recs, "Casualties ~ Targets + Shots_Fired")
    assert design.names == ["(Intercept)"]
    assert any("Targets" in d for d in design.diagnostics)


def test_exact_fit():
    X = np.column_stack([np.ones(5), np.arange(5.0), np.array([3, 1, 4, 1, 5.0])])
    fit = ols_fit(X, X[:, 2])
    assert fit.beta == pytest.approx([0, 0, 1], abs=1e-12)
    assert fit.rss == pytest.approx(0, abs=1e-20)


def test_hand_normal_equations():
    X = np.column_stack([np.ones(3), [0.0, 1, 2]])
    fit = ols_fit(X, np.array([1.0, 3, 4]))
    assert fit.beta == pytest.approx([7 / 6, 1.5], rel=1e-12)
    assert fit.rss == pytest.approx(1 / 6, rel=1e-12)


def test_random_instances_match_normal_equations():
    rng = np.random.default_rng(5)
    for _ in range(50):
        X = np.column_stack([np.ones(50), rng.normal(size=(50, 3))])
        y = rng.normal(size=50)
        fit = ols_fit(X, y)
        assert fit.beta == pytest.approx(normal_equations(X, y), rel=1e-8, abs=1e-12)
        assert np.max(np.abs(X.T @ fit.residuals)) < 1e-8 * max(1.0, np.abs(y).max())
        assert abs(fit.residuals.sum()) < 1e-8


def test_rank_deficient_named():
    X = np.column_stack([np.ones(4), [1.0, 2, 3, 4], [2.0, 4, 6, 8]])
    with pytest.raises(RankDeficientError) as exc:
        ols_fit(X, np.arange(4.0), ["(Intercept)", "a", "b"])
    assert exc.value.columns == ["b"]


def test_prune_dependent():
    cols = [np.ones(4), np.zeros(4), np.array([1.0, 2, 3, 4]), np.array([2.0, 3, 4, 5])]
    assert prune_dependent(cols) == [0, 2]


def test_type1_matches_nested_refits():
    rng = np.random.default_rng(11)
    recs = random_records(rng, 80)
    design, y = encode_design(recs, "Casualties ~ Targets + Shots_Fired + Weapon_Type")
    table = anova_type1_design(design, y)
    for row, ss in zip(table.rows, nested_ss(design, y)):
        assert row.sum_sq == pytest.approx(ss, rel=1e-8)
    fit = ols_fit(design.X, y)
    total = sum(r.sum_sq for r in table.rows) + table.residual.sum_sq
    assert total == pytest.approx(fit.tss, rel=1e-10)


def test_type1_order_changes_terms_not_total():
    rng = np.random.default_rng(2)
    recs = random_records(rng, 120)
    a = anova_type1(recs, "Casualties ~ Shots_Fired + Shooter_Age + Targets")
    b = anova_type1(recs, "Casualties ~ Targets + Shooter_Age + Shots_Fired")
    assert sum(r.sum_sq for r in a.rows) == pytest.approx(sum(r.sum_sq for r in b.rows), rel=1e-10)
    assert a.row("Shots_Fired").sum_sq != pytest.approx(b.row("Shots_Fired").sum_sq, rel=1e-6)


def test_constant_response():
    recs = [make_record(id=str(i), targets=["both", "neither"][i % 2], shots_fired=i)
            for i in range(10)]
    table = anova_type1(recs, "Casualties ~ Targets + Shots_Fired")
    for row in table.rows:
        assert row.sum_sq == 0 and row.statistic == 0 and row.p == 1


def test_anova_rows_and_residual_df(synth_records):
    table = anova_type1(synth_records, "Casualties ~ Weapon_Type + Shots_Fired")
    assert [r.term for r in table.rows] == ["Weapon_Type", "Shots_Fired"]
    assert table.row("Weapon_Type").df == 8
    assert table.residual.df == table.n - 1 - 8 - 1
    assert all(0 <= r.p <= 1 for r in table.rows)


def test_no_residual_df_is_data_error():
    recs = [make_record(id=str(i), shots_fired=i, wounded=i * i) for i in range(2)]
    with pytest.raises(DataError):
        anova_type1(recs, "Casualties ~ Shots_Fired")


def test_vif_examples():
    a = np.array([1.0, -1, 1, -1])
    b = np.array([1.0, 1, -1, -1])
    X = np.column_stack([np.ones(4), a, b])
    assert list(vif(X).values()) == pytest.approx([1.0, 1.0])
    X = np.column_stack([np.ones(4), a, a])
    assert all(math.isinf(v) for v in vif(X).values())
    # second column built so its R^2 on the first is exactly 0.75
    rng = np.random.default_rng(0)
    u = rng.normal(size=200)
    e = rng.normal(size=200)
    u -= u.mean()
    e -= e.mean()
    e -= (e @ u) / (u @ u) * u
    e *= np.sqrt(u @ u / (e @ e)) / np.sqrt(3)
    X = np.column_stack([np.ones(200), u, u + e])
    assert list(vif(X).values()) == pytest.approx([4.0, 4.0], rel=1e-9)
