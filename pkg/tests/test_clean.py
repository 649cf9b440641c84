import datetime as dt

import pytest

from conftest import make_record
from incidentstats.clean import (CLEAN_COLUMNS, GENDERS, RACES, WEAPON_TYPES,
                                 AgeImputationPolicy, Era, TriState, build_analysis_table,
                                 compute_age_policy, impute_age, merge_gender, merge_race,
                                 merge_tristate, merge_weapon, read_clean_table, split_era,
                                 write_clean_table)
from incidentstats.errors import DataError
from incidentstats.ingest import RawIncident, RawShooter, RawWeapon, join_by_incident


def _shooters(*ages):
    return [RawShooter("A", str(a)) for a in ages]


def test_policy_single_value():
    p = compute_age_policy(_shooters(17))
    assert (p.overall_median, p.child_median, p.teen_median, p.adult_median) == (17, 17, 17, 17)


def test_policy_strata():
    p = compute_age_policy(_shooters(8, 10, 15, 16, 17, 20, 30))
    assert (p.overall_median, p.child_median, p.teen_median, p.adult_median) == (16, 9, 16, 25)


def test_policy_age_twelve_is_child():
    p = compute_age_policy(_shooters(12, 16, 40))
    assert p.child_median == 12


def test_policy_ignores_keywords_and_needs_numbers():
    p = compute_age_policy(_shooters(14, "teen", "", 20))
    assert p.overall_median == 17
    with pytest.raises(DataError):
        compute_age_policy(_shooters("teen", ""))


POLICY = AgeImputationPolicy(17.0, 9.0, 16.0, 25.0)


@pytest.mark.parametrize("raws, expected", [
    (["teen"], 16.0), ([""], 17.0), (["14", "20"], 17.0), (["child", "adult"], 17.0), ([], 17.0),
])
def test_impute_age(raws, expected):
    age, diags = impute_age(raws, POLICY)
    assert age == expected and diags == []


def test_impute_unrecognised_keyword_diagnosed():
    age, diags = impute_age(["elderly"], POLICY, "A")
    assert age == 17.0 and len(diags) == 1


@pytest.mark.parametrize("genders, expected", [
    (["male", "male"], "male"), (["male", "female"], "multiple"), ([], "unknown"),
    (["Female", "unknown"], "female"),
])
def test_merge_gender(genders, expected):
    assert merge_gender(genders) == expected


def test_merge_race():
    assert merge_race(["black", "black"]) == "black"
    assert merge_race(["black", "white"]) == "multiple"
    assert merge_race(["", "unknown"]) is None


@pytest.mark.parametrize("classes, expected", [
    (["handgun", "handgun"], "multiple handguns"), (["rifle", "Rifle"], "multiple rifles"),
    (["handgun", "rifle"], "multiple unknown"), ([], "no data"), (["shotgun"], "shotgun"),
    (["musket"], "other"),
])
def test_merge_weapon(classes, expected):
    assert merge_weapon(classes) == expected


def test_merge_tristate():
    assert merge_tristate([None, False, True]) is TriState.YES
    assert merge_tristate([None, False]) is TriState.NO
    assert merge_tristate([]) is TriState.MISSING


def _joined():
    inc = RawIncident("A", dt.date(2019, 5, 3), 40.0, -90.0, 1, 3, targets="both")
    shooters = [RawShooter("A", "14", "male"), RawShooter("A", "20", "female")]
    weapons = [RawWeapon("A", "handgun")]
    return join_by_incident([inc], shooters, weapons)


def test_build_composes_rules():
    records, diags = build_analysis_table(_joined())
    (r,) = records
    assert r.casualties == 4 and r.shooter_age == 17.0 and r.shooter_gender == "multiple"
    assert r.weapon_type == "handgun" and r.year == 2019 and r.month == 5
    assert r.bullied is TriState.MISSING and diags == []


def test_split_era_boundaries():
    recs = [make_record(id="a", year=2016), make_record(id="b", year=2017),
            make_record(id="c", year=2018), make_record(id="d", year=2019)]
    assert [r.id for r in split_era(recs, Era.PRE2018)] == ["a", "b"]
    assert [r.id for r in split_era(recs, "post2018")] == ["c", "d"]
    assert len(split_era(recs, "all")) == 4


def test_era_partition(synth_records):
    pre, post = split_era(synth_records, "pre2018"), split_era(synth_records, "post2018")
    assert len(pre) + len(post) == len(synth_records)
    assert not {r.id for r in pre} & {r.id for r in post}


def test_synthetic_closure(synth_records):
    assert len(synth_records) == 2584
    for r in synth_records:
        assert r.shooter_gender in GENDERS
        assert r.race is None or r.race in RACES
        assert r.weapon_type in WEAPON_TYPES
        assert 3 <= r.shooter_age <= 100
        assert r.casualties == r.killed + r.wounded


def test_clean_table_round_trip(synth_records):
    data = write_clean_table(synth_records)
    back = read_clean_table(data)
    assert back == synth_records
    assert write_clean_table(back) == data
    assert data.decode().splitlines()[0].split(",") == list(CLEAN_COLUMNS)


def test_clean_table_malformed_row():
    data = write_clean_table([make_record()]).decode().replace(",handgun,", ",handgun,extra,")
    with pytest.raises(DataError):
        read_clean_table(data.encode())
