import numpy as np
import pytest

from conftest import make_record
from helpers import GENDER_LEVELS, TARGET_LEVELS, WEAPON_LEVELS
from incidentstats.model import drop_one_pvalues, eliminate_insignificant, parse_model_formula
from incidentstats.model.formula import term_label

NOISE_FORMULA = ("Casualties ~ Targets + Weapon_Type + Shots_Fired + Shooter_Gender"
                 " + Shooter_Age")


def one_effect_records(seed, n=150):
    rng = np.random.default_rng(seed)
    recs = []
    for i in range(n):
        shots = int(rng.integers(0, 12))
        wounded = int(rng.poisson(1.0 + 0.5 * shots))
        recs.append(make_record(
            id=f"S{i}", shots_fired=shots, wounded=wounded, killed=0,
            targets=rng.choice(TARGET_LEVELS), weapon_type=rng.choice(WEAPON_LEVELS),
            shooter_gender=rng.choice(GENDER_LEVELS), shooter_age=float(rng.integers(10, 50))))
    return recs


def test_weakest_term_dropped_first():
    recs = one_effect_records(0)
    formula = parse_model_formula(NOISE_FORMULA)
    pvals = drop_one_pvalues(recs, formula)
    worst = max(pvals, key=pvals.get)
    final, trail = eliminate_insignificant(recs, formula)
    assert trail[0].term == term_label(worst) and trail[0].p == pytest.approx(pvals[worst])
    assert "Shots_Fired" in [term_label(t) for t in final.terms]
    assert all(s.p > 0.05 for s in trail)


def test_true_effect_retained_across_seeds():
    kept = 0
    seeds = range(30)
    for seed in seeds:
        final, _ = eliminate_insignificant(one_effect_records(seed), NOISE_FORMULA, 0.05)
        kept += ("Shots_Fired",) in final.terms
    assert kept / len(seeds) >= 0.9


def test_hierarchy_protects_main_effects():
    rng = np.random.default_rng(5)
    recs = []
    for i in range(160):
        t = rng.choice(["both", "neither"])
        shots = int(rng.integers(0, 10))
        # effect of shots exists only for one target level
        mean = 2 + (1.5 * shots if t == "both" else -1.5 * shots + 15)
        recs.append(make_record(id=str(i), targets=t, shots_fired=shots,
                                wounded=max(0, int(round(mean + rng.normal()))), killed=0))
    final, trail = eliminate_insignificant(recs, "Casualties ~ Shots_Fired + Targets + "
                                                 "Targets:Shots_Fired")
    labels = [term_label(t) for t in final.terms]
    assert "Targets:Shots_Fired" in labels
    assert "Shots_Fired" in labels and "Targets" in labels
    pvals = drop_one_pvalues(recs, parse_model_formula(
        "Casualties ~ Shots_Fired + Targets + Targets:Shots_Fired"))
    assert [term_label(t) for t in pvals] == ["Targets:Shots_Fired"]


def test_nb_elimination_runs(synth_records):
    final, trail = eliminate_insignificant(synth_records[:600],
                                           "Casualties ~ Shooter_Age + Targets", kind="nb")
    assert len(final.terms) >= 1
    for s in trail:
        assert s.p > 0.05


def test_bad_alpha():
    with pytest.raises(ValueError):
        eliminate_insignificant([], "Casualties ~ Targets", alpha=1.5)
